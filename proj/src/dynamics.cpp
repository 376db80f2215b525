#include "txn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace txn {

namespace {

constexpr double kClampDiagnostic = 1e-9;

void check_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-3))
    throw std::invalid_argument("tolerance must lie in [1e-12, 1e-3]");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<double> sample_times(double t0, double t1, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    t[std::size_t(i)] = i == n - 1 ? t1 : t0 + (t1 - t0) * double(i) / double(n - 1);
  return t;
}

// Tracks how far sqrt arguments stray outside [0, 1] before clamping.
struct Clamp {
  double excess = 0.0;
  double operator()(double v) {
    if (v < 0.0) {
      excess = std::max(excess, -v);
      return 0.0;
    }
    if (v > 1.0) {
      excess = std::max(excess, v - 1.0);
      return 1.0;
    }
    return v;
  }
};

OdeOptions options_for(double tol) {
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol * 1e-4;
  return o;
}

template <int Dim>
Trajectory make_trajectory(const OdeSolution<double, Dim> &sol, double time_scale,
                           std::vector<std::string> columns, std::vector<std::string> units) {
  Trajectory tr;
  tr.columns = std::move(columns);
  tr.units = std::move(units);
  const auto n = Eigen::Index(sol.times.size());
  tr.times.resize(n);
  tr.values.resize(n, Eigen::Index(tr.columns.size()));
  for (Eigen::Index i = 0; i < n; ++i)
    tr.times[i] = sol.times[std::size_t(i)] * time_scale;
  tr.stats = sol.stats;
  return tr;
}

void finish(Trajectory &tr, const OdeSolution<double, Eigen::Dynamic> &sol, const Clamp &clamp,
            double tol) {
  tr.max_clamp_excess = clamp.excess;
  tr.clamp_diagnostic = clamp.excess > kClampDiagnostic;
  tr.metadata["tol"] = fmt(tol);
  tr.metadata["steps_accepted"] = std::to_string(sol.stats.accepted);
  tr.metadata["steps_rejected"] = std::to_string(sol.stats.rejected);
  tr.metadata["rhs_evaluations"] = std::to_string(sol.stats.evaluations);
  tr.metadata["clamp_excess"] = fmt(clamp.excess);
  if (!sol.ok())
    throw IntegrationFailure(tr.kind + ": " + sol.message, tr);
}

void require_span(double t0, double t1, int samples) {
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
    throw std::invalid_argument("time span must be finite with t_end > t_start");
  if (samples < 2)
    throw std::invalid_argument("need at least two output samples");
}

} // namespace

void TwoAtomScenario::validate() const {
  if (!(tau > 0.0))
    throw std::invalid_argument("two-atom: tau must be positive");
  if (!(initial_b2_alpha > 0.0 && initial_b2_alpha < 1.0))
    throw std::invalid_argument("two-atom: initial b2_alpha must lie strictly inside (0, 1)");
  if (!(phase_sin_phi >= -1.0 && phase_sin_phi <= 1.0))
    throw std::invalid_argument("two-atom: sin(phi) must lie in [-1, 1]");
  require_span(t_start, t_end, samples);
}

void CompetitionScenario::validate() const {
  if (!(tau > 0.0))
    throw std::invalid_argument("compete: tau must be positive");
  // One zero seed is allowed: it switches that recipient off entirely.
  if (!(seed_beta1 >= 0.0 && seed_beta2 >= 0.0) || !(seed_beta1 + seed_beta2 > 0.0) ||
      !(seed_beta1 + seed_beta2 < 1.0))
    throw std::invalid_argument("compete: seeds must be non-negative, not both zero, sum < 1");
  if (!std::isfinite(delta_omega))
    throw std::invalid_argument("compete: detuning must be finite");
  require_span(t_start, t_end, samples);
}

void CascadeScenario::validate() const {
  if (!(tau_alpha > 0.0 && tau_beta > 0.0))
    throw std::invalid_argument("cascade: timescales must be positive");
  for (double v : {a2, b2, c2})
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("cascade: squared amplitudes must lie in [0, 1]");
  if (std::abs(a2 + b2 + c2 - 1.0) > 1e-12)
    throw std::invalid_argument("cascade: a2 + b2 + c2 must equal 1");
  require_span(t_start, t_end, samples);
}

Eigen::Index Trajectory::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name)
      return Eigen::Index(i);
  throw std::out_of_range("trajectory has no column '" + std::string(name) + "'");
}

double Trajectory::max_conservation_error() const {
  double worst = 0.0;
  for (const auto &group : conserved) {
    std::vector<Eigen::Index> idx;
    for (const auto &c : group)
      idx.push_back(column(c));
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      double s = 0.0;
      for (auto j : idx)
        s += values(i, j);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return worst;
}

Trajectory integrate_two_atom(const TwoAtomScenario &s, double tol) {
  s.validate();
  check_tol(tol);
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;
  // state (b2_alpha, a2_alpha, b2_beta, a2_beta) in t / tau
  const double sin_phi = s.phase_sin_phi;
  auto rhs = [sin_phi](double, const Vec &y) {
    const double f = sin_phi * y[0] * (1.0 - y[0]);
    Vec d(4);
    d << f, -f, -f, f;
    return d;
  };
  Vec y0(4);
  y0 << s.initial_b2_alpha, 1.0 - s.initial_b2_alpha, 1.0 - s.initial_b2_alpha,
      s.initial_b2_alpha;
  const auto ts = sample_times(s.t_start / s.tau, s.t_end / s.tau, s.samples);
  const auto sol = DormandPrince<double>(options_for(tol)).solve(rhs, ts.front(), y0,
                                                                std::span<const double>(ts));
  Trajectory tr = make_trajectory(sol, s.tau,
                                  {"b2_alpha", "a2_alpha", "b2_beta", "a2_beta", "power"},
                                  {"1", "1", "1", "1", "1/tau"});
  tr.kind = "two-atom";
  for (Eigen::Index i = 0; i < tr.times.size(); ++i) {
    const auto &y = sol.states[std::size_t(i)];
    tr.values.row(i).head(4) = y.transpose();
    tr.values(i, 4) = -sin_phi * y[0] * (1.0 - y[0]) / s.tau;
  }
  tr.conserved = {{"b2_alpha", "a2_alpha"}, {"b2_beta", "a2_beta"}, {"b2_alpha", "b2_beta"}};
  tr.metadata = {{"tau", fmt(s.tau)},
                 {"t_start", fmt(s.t_start)},
                 {"t_end", fmt(s.t_end)},
                 {"initial_b2_alpha", fmt(s.initial_b2_alpha)},
                 {"sin_phi", fmt(s.phase_sin_phi)}};
  finish(tr, sol, Clamp{}, tol);
  return tr;
}

Trajectory integrate_competition(const CompetitionScenario &s, double tol) {
  s.validate();
  check_tol(tol);
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;
  Clamp clamp;
  const double dw = s.delta_omega;
  auto rates = [&clamp, dw](double t, const Vec &y, double &r1, double &r2) {
    const double b1 = y[1], b2 = y[2];
    const double shared = (1.0 - b1 - b2) * (b1 + b2);
    r1 = std::sqrt(clamp(b1 * (1.0 - b1) * shared));
    r2 = std::sqrt(clamp(b2 * (1.0 - b2) * shared)) * std::cos(dw * t);
  };
  auto rhs = [&rates](double t, const Vec &y) {
    double r1, r2;
    rates(t, y, r1, r2);
    Vec d(3);
    d << -(r1 + r2), r1, r2;
    return d;
  };
  Vec y0(3);
  y0 << 1.0 - s.seed_beta1 - s.seed_beta2, s.seed_beta1, s.seed_beta2;
  const auto ts = sample_times(s.t_start / s.tau, s.t_end / s.tau, s.samples);
  const auto sol = DormandPrince<double>(options_for(tol)).solve(rhs, ts.front(), y0,
                                                                std::span<const double>(ts));
  Trajectory tr = make_trajectory(sol, s.tau, {"b2_alpha", "b2_beta1", "b2_beta2", "power"},
                                  {"1", "1", "1", "1/tau"});
  tr.kind = "compete";
  Clamp probe; // reporting only, keeps the integration diagnostic clean
  for (Eigen::Index i = 0; i < tr.times.size(); ++i) {
    const auto &y = sol.states[std::size_t(i)];
    tr.values.row(i).head(3) = y.transpose();
    const double b1 = y[1], b2 = y[2], shared = (1.0 - b1 - b2) * (b1 + b2);
    tr.values(i, 3) = (std::sqrt(probe(b1 * (1.0 - b1) * shared)) +
                       std::sqrt(probe(b2 * (1.0 - b2) * shared)) *
                           std::cos(dw * sol.times[std::size_t(i)])) /
                      s.tau;
  }
  tr.conserved = {{"b2_alpha", "b2_beta1", "b2_beta2"}};
  tr.metadata = {{"tau", fmt(s.tau)},
                 {"delta_omega", fmt(s.delta_omega)},
                 {"seed_beta1", fmt(s.seed_beta1)},
                 {"seed_beta2", fmt(s.seed_beta2)},
                 {"t_start", fmt(s.t_start)},
                 {"t_end", fmt(s.t_end)}};
  finish(tr, sol, clamp, tol);
  return tr;
}

Trajectory integrate_cascade(const CascadeScenario &s, double tol) {
  s.validate();
  check_tol(tol);
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;
  Clamp clamp;
  const double k = s.tau_alpha / s.tau_beta;
  // state (a2, b2, c2); time in units of tau_alpha
  auto rhs = [&clamp, k](double, const Vec &y) {
    const double b = std::sqrt(clamp(y[1]));
    const double lower = k * y[0] * b * std::sqrt(clamp(1.0 - y[0]));
    const double upper = -y[2] * b * std::sqrt(clamp(1.0 - y[2]));
    Vec d(3);
    d << lower, -(lower + upper), upper;
    return d;
  };
  Vec y0(3);
  y0 << s.a2, s.b2, s.c2;
  const auto ts = sample_times(s.t_start, s.t_end, s.samples);
  const auto sol = DormandPrince<double>(options_for(tol)).solve(rhs, ts.front(), y0,
                                                                std::span<const double>(ts));
  Trajectory tr = make_trajectory(sol, 1.0,
                                  {"a2", "b2", "c2", "upper_envelope", "lower_envelope"},
                                  {"1", "1", "1", "1", "1"});
  tr.kind = "cascade";
  Clamp probe;
  for (Eigen::Index i = 0; i < tr.times.size(); ++i) {
    const auto &y = sol.states[std::size_t(i)];
    tr.values.row(i).head(3) = y.transpose();
    const double a = std::sqrt(probe(y[0])), b = std::sqrt(probe(y[1])),
                 c = std::sqrt(probe(y[2]));
    tr.values(i, 3) = b * c;
    tr.values(i, 4) = a * b;
  }
  tr.conserved = {{"a2", "b2", "c2"}};
  tr.metadata = {{"tau_alpha", fmt(s.tau_alpha)},
                 {"tau_beta", fmt(s.tau_beta)},
                 {"a2", fmt(s.a2)},
                 {"b2", fmt(s.b2)},
                 {"c2", fmt(s.c2)},
                 {"t_start", fmt(s.t_start)},
                 {"t_end", fmt(s.t_end)}};
  finish(tr, sol, clamp, tol);
  return tr;
}

TwoAtomAmplitudes analytic_two_atom(double t, double tau, double t_offset) {
  if (!(tau > 0.0))
    throw std::invalid_argument("analytic_two_atom: tau must be positive");
  const double x = (t - t_offset) / tau;
  // 1 / (e^x + 1), written to stay accurate for large |x|
  const double b2 = x > 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (std::exp(x) + 1.0);
  const double a2 = x > 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (std::exp(x) + 1.0);
  return {b2, a2, a2, b2};
}

double logistic_offset(double t, double b2, double tau) {
  if (!(b2 > 0.0 && b2 < 1.0))
    throw std::invalid_argument("logistic_offset: b2 must lie in (0, 1)");
  return t - tau * std::log((1.0 - b2) / b2);
}

double crossing_time(const Trajectory &traj, std::string_view name, double level) {
  const auto v = traj.series(name);
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double lo = v[i - 1] - level, hi = v[i] - level;
    if (lo == 0.0)
      return traj.times[i - 1];
    if ((lo < 0.0) != (hi < 0.0) || hi == 0.0) {
      const double f = lo / (lo - hi);
      return traj.times[i - 1] + f * (traj.times[i] - traj.times[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double peak_time(const Trajectory &traj, std::string_view name) {
  const auto v = traj.series(name);
  Eigen::Index k;
  v.maxCoeff(&k);
  if (k == 0 || k == v.size() - 1)
    return traj.times[k];
  const double y0 = v[k - 1], y1 = v[k], y2 = v[k + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  const double h = traj.times[k + 1] - traj.times[k];
  if (denom >= 0.0)
    return traj.times[k];
  return traj.times[k] + 0.5 * h * (y0 - y2) / denom;
}

} // namespace txn
