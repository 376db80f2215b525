#include "txn/fields.hpp"

#include "txn/ode.hpp"
#include "txn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace txn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double alpha_distance(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

double beta_distance(const HandshakeFieldConfig &cfg, double x, double y, double z) {
  const double dx = x - cfg.separation;
  return std::sqrt(dx * dx + y * y + z * z);
}

// fourth-order central first derivative along unit axis `axis`
Eigen::Vector3d gradient(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &p, double t,
                         double h) {
  Eigen::Vector3d g;
  for (int axis = 0; axis < 3; ++axis) {
    auto at = [&](double s) {
      Eigen::Vector3d q = p;
      q[axis] += s;
      return handshake_potential_raw(cfg, q[0], q[1], q[2], t);
    };
    g[axis] = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
  }
  return g;
}

// parabola vertex through three equally spaced samples
double vertex_offset(double f0, double f1, double f2) {
  const double denom = f0 - 2.0 * f1 + f2;
  return denom == 0.0 ? 0.0 : 0.5 * (f0 - f2) / denom;
}

} // namespace

Eigen::VectorXd GridSpec::x_coords() const {
  return Eigen::VectorXd::LinSpaced(nx, x_min, x_max);
}

Eigen::VectorXd GridSpec::y_coords() const {
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(ny, y_min, y_max);
  if (y_min == -y_max) {
    for (int j = 0; j < ny / 2; ++j)
      y[ny - 1 - j] = -y[j];
    if (ny % 2 == 1)
      y[ny / 2] = 0.0;
  }
  return y;
}

void GridSpec::validate() const {
  if (!(x_max > x_min && y_max > y_min) || nx < 2 || ny < 2)
    throw std::invalid_argument("grid: need x_max > x_min, y_max > y_min and at least 2x2 samples");
}

HandshakeFieldConfig HandshakeFieldConfig::with_separation(double separation) {
  HandshakeFieldConfig cfg;
  cfg.separation = separation;
  cfg.grid.x_max = separation + 5.0;
  return cfg;
}

void HandshakeFieldConfig::validate() const {
  grid.validate();
  if (!(separation > 2.0 * exclusion_radius))
    throw std::invalid_argument("field: separation must exceed the exclusion discs");
  if (!(exclusion_radius > 0.0))
    throw std::invalid_argument("field: exclusion radius must be positive");
  if (times.empty())
    throw std::invalid_argument("field: need at least one time");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("field: times must be increasing");
}

double handshake_potential_raw(const HandshakeFieldConfig &cfg, double x, double y, double z,
                               double t) {
  const double ra = alpha_distance(x, y, z), rb = beta_distance(cfg, x, y, z);
  double a = 0.0;
  if (cfg.alpha_amplitude != 0.0)
    a -= cfg.alpha_amplitude * std::sin(t - ra) / ra;
  if (cfg.beta_amplitude != 0.0)
    a += cfg.beta_amplitude * std::cos(t + cfg.separation + rb) / rb;
  return cfg.envelope_rate * a;
}

double handshake_time_derivative(const HandshakeFieldConfig &cfg, double x, double y, double z,
                                 double t) {
  const double ra = alpha_distance(x, y, z), rb = beta_distance(cfg, x, y, z);
  double d = 0.0;
  if (cfg.alpha_amplitude != 0.0)
    d -= cfg.alpha_amplitude * std::cos(t - ra) / ra;
  if (cfg.beta_amplitude != 0.0)
    d -= cfg.beta_amplitude * std::sin(t + cfg.separation + rb) / rb;
  return cfg.envelope_rate * d;
}

bool in_exclusion(const HandshakeFieldConfig &cfg, double x, double y, double z) {
  return alpha_distance(x, y, z) < cfg.exclusion_radius ||
         beta_distance(cfg, x, y, z) < cfg.exclusion_radius;
}

std::optional<double> eval_handshake_potential(const HandshakeFieldConfig &cfg, double x,
                                               double y, double t) {
  if (in_exclusion(cfg, x, y))
    return std::nullopt;
  return handshake_potential_raw(cfg, x, y, 0.0, t);
}

namespace {

Eigen::MatrixXd sample_frame(const HandshakeFieldConfig &cfg, const Eigen::VectorXd &x,
                             const Eigen::VectorXd &y, double t) {
  Eigen::MatrixXd f(y.size(), x.size());
  for (Eigen::Index r = 0; r < y.size(); ++r)
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      const auto v = eval_handshake_potential(cfg, x[c], y[r], t);
      f(r, c) = v ? *v : kNaN;
    }
  return f;
}

} // namespace

std::vector<double> axis_maxima(const HandshakeFieldConfig &cfg, double t, double margin) {
  const double lo = margin, hi = cfg.separation - margin, step = 0.01;
  const int n = int(std::ceil((hi - lo) / step)) + 1;
  const double h = (hi - lo) / double(n - 1);
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    f[std::size_t(i)] = handshake_potential_raw(cfg, lo + h * i, 0.0, 0.0, t);
  std::vector<double> out;
  for (int i = 1; i + 1 < n; ++i) {
    const double a = f[std::size_t(i - 1)], b = f[std::size_t(i)], c = f[std::size_t(i + 1)];
    if (b > a && b >= c)
      out.push_back(lo + h * (i + vertex_offset(a, b, c)));
  }
  return out;
}

FieldGrid field_movie(const HandshakeFieldConfig &cfg) {
  cfg.validate();
  FieldGrid g;
  g.x = cfg.grid.x_coords();
  g.y = cfg.grid.y_coords();
  g.times = cfg.times;
  g.frames.reserve(cfg.times.size());
  for (double t : cfg.times) {
    g.frames.push_back(sample_frame(cfg, g.x, g.y, t));
    g.axis_maxima.push_back(axis_maxima(cfg, t));
  }
  return g;
}

MaximaTracking track_axis_maxima(const FieldGrid &movie) {
  MaximaTracking m;
  m.min_displacement = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < movie.axis_maxima.size(); ++k) {
    const auto &now = movie.axis_maxima[k], &next = movie.axis_maxima[k + 1];
    for (double x : now) {
      double best = std::numeric_limits<double>::infinity(), best_x = 0.0;
      for (double xn : next)
        if (std::abs(xn - x) < best) {
          best = std::abs(xn - x);
          best_x = xn;
        }
      // a maximum born or absorbed at the ends has no partner nearby
      if (best > 1.0)
        continue;
      ++m.tracked_steps;
      const double d = best_x - x;
      if (d > 0.0)
        ++m.forward_steps;
      m.min_displacement = std::min(m.min_displacement, d);
    }
  }
  if (m.tracked_steps == 0)
    m.min_displacement = 0.0;
  return m;
}

ContourSet zero_crossing_contours(const HandshakeFieldConfig &cfg, double t) {
  cfg.validate();
  const auto x = cfg.grid.x_coords(), y = cfg.grid.y_coords();
  return marching_squares(sample_frame(cfg, x, y, t), x, y, 0.0);
}

Eigen::Vector3d poynting(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &p, double t,
                         double h) {
  const double e = -handshake_time_derivative(cfg, p[0], p[1], p[2], t);
  return e * gradient(cfg, p, t, h);
}

Eigen::Vector3d poynting_average(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &p,
                                 double t0, int phases) {
  if (phases < 3)
    throw std::invalid_argument("poynting_average: need at least three phases");
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (int k = 0; k < phases; ++k)
    s += poynting(cfg, p, t0 + 2.0 * kPi * double(k) / double(phases));
  return s / double(phases);
}

const char *to_string(StreamEnd e) {
  switch (e) {
  case StreamEnd::LeftGrid: return "left_grid";
  case StreamEnd::ReachedAlpha: return "reached_alpha";
  case StreamEnd::ReachedBeta: return "reached_beta";
  case StreamEnd::Stagnation: return "stagnation";
  case StreamEnd::MaxLength: return "max_length";
  case StreamEnd::Failure: return "failure";
  }
  return "?";
}

std::vector<Streamline> poynting_streamlines(const HandshakeFieldConfig &cfg,
                                             const std::vector<Eigen::Vector2d> &seeds,
                                             const StreamlineOptions &opts) {
  cfg.validate();
  using Vec2 = Eigen::Matrix<double, 2, 1>;
  OdeOptions o;
  o.rtol = opts.tolerance;
  o.atol = opts.tolerance;
  o.max_step = 0.5 * cfg.exclusion_radius;
  DormandPrince<double, 2> stepper(o);
  const auto &g = cfg.grid;

  std::vector<Streamline> out;
  out.reserve(seeds.size());
  for (const auto &seed : seeds) {
    if (in_exclusion(cfg, seed[0], seed[1]))
      throw std::invalid_argument("poynting_streamlines: seed inside an exclusion disc");
    Streamline line;
    line.points.push_back(seed);
    bool stalled = false;
    auto rhs = [&](double, const Vec2 &p) -> Vec2 {
      const Eigen::Vector3d q(p[0], p[1], 0.0);
      const Eigen::Vector3d s =
          opts.time_averaged ? poynting_average(cfg, q, opts.t) : poynting(cfg, q, opts.t);
      const double n = std::hypot(s[0], s[1]);
      if (!(n > opts.stagnation)) {
        stalled = true;
        return Vec2::Zero();
      }
      return Vec2(s[0] / n, s[1] / n);
    };
    // a seed sitting on a stagnation point never moves
    rhs(0.0, seed);
    if (stalled) {
      line.end = StreamEnd::Stagnation;
      out.push_back(std::move(line));
      continue;
    }
    std::optional<StreamEnd> end;
    auto observer = [&](const DormandPrince<double, 2>::Step &st) {
      const Vec2 &p = st.y1;
      line.points.push_back(p);
      line.length = st.t1;
      if (alpha_distance(p[0], p[1], 0.0) < cfg.exclusion_radius)
        end = StreamEnd::ReachedAlpha;
      else if (beta_distance(cfg, p[0], p[1], 0.0) < cfg.exclusion_radius)
        end = StreamEnd::ReachedBeta;
      else if (p[0] < g.x_min || p[0] > g.x_max || p[1] < g.y_min || p[1] > g.y_max)
        end = StreamEnd::LeftGrid;
      else if (stalled)
        end = StreamEnd::Stagnation;
      return !end.has_value();
    };
    const auto status = stepper.integrate(rhs, 0.0, Vec2(seed), opts.max_length, observer);
    if (end)
      line.end = *end;
    else if (status == OdeStatus::Success)
      line.end = StreamEnd::MaxLength;
    else
      line.end = StreamEnd::Failure;
    out.push_back(std::move(line));
  }
  return out;
}

FluxBalance box_flux(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &centre, double half,
                     int order) {
  if (!(half > 0.0))
    throw std::invalid_argument("box_flux: half-width must be positive");
  const double ra = (centre - Eigen::Vector3d::Zero()).lpNorm<Eigen::Infinity>();
  const double rb = (centre - Eigen::Vector3d(cfg.separation, 0.0, 0.0)).lpNorm<Eigen::Infinity>();
  if (ra <= half + cfg.exclusion_radius || rb <= half + cfg.exclusion_radius)
    throw std::invalid_argument("box_flux: box must not contain either atom");
  const auto rule = gauss_legendre<double>(order, -half, half);
  FluxBalance fb;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (double side : {-1.0, 1.0}) {
      for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
        for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
          Eigen::Vector3d p = centre;
          p[axis] += side * half;
          p[u] += rule.nodes[i];
          p[v] += rule.nodes[j];
          const double sn = side * poynting_average(cfg, p)[axis];
          const double w = rule.weights[i] * rule.weights[j];
          fb.net += w * sn;
          fb.gross += w * std::abs(sn);
        }
    }
  }
  return fb;
}

LobePhases bisector_lobe_phases(const HandshakeFieldConfig &cfg, double t, double y_max) {
  const double x = 0.5 * cfg.separation, step = 0.005;
  const int n = int(std::ceil(y_max / step)) + 1;
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    f[std::size_t(i)] = std::abs(handshake_potential_raw(cfg, x, step * i, 0.0, t));
  LobePhases lp;
  for (int i = 1; i + 1 < n; ++i) {
    const double a = f[std::size_t(i - 1)], b = f[std::size_t(i)], c = f[std::size_t(i + 1)];
    if (b > a && b >= c) {
      const double y = step * (i + vertex_offset(a, b, c));
      lp.y.push_back(y);
      lp.path_lengths.push_back(2.0 * std::hypot(x, y));
    }
  }
  for (std::size_t i = 1; i < lp.path_lengths.size(); ++i) {
    const double cycles = (lp.path_lengths[i] - lp.path_lengths[i - 1]) / (2.0 * kPi);
    lp.max_cycle_error = std::max(lp.max_cycle_error, std::abs(cycles - std::round(cycles)));
  }
  return lp;
}

} // namespace txn
