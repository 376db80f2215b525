#include "txn/atomic_states.hpp"

#include "txn/quadrature.hpp"

#include <algorithm>
#include <string>

namespace txn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRadialOrder = 20;

int radial_panels(const QuadratureSpec &spec) {
  return std::max(1, spec.radial_points / kRadialOrder);
}

// Integral of f(r, mu) r^2 over r in [0, cutoff], mu = cos(theta) in [-1, 1],
// times 2 pi for the azimuth. Fixed summation order.
template <class F>
double spherical_integral(const QuadratureSpec &spec, F &&f) {
  const auto radial =
      composite_gauss_legendre<double>(0.0, spec.radial_cutoff, radial_panels(spec), kRadialOrder);
  const auto angular = gauss_legendre<double>(spec.angular_points);
  double total = 0.0;
  for (Eigen::Index i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    double shell = 0.0;
    for (Eigen::Index j = 0; j < angular.nodes.size(); ++j)
      shell += angular.weights[j] * f(r, angular.nodes[j]);
    total += radial.weights[i] * r * r * shell;
  }
  return 2.0 * kPi * total;
}

void require_spatial(const EigenState &s) {
  if (!s.has_amplitude())
    throw std::invalid_argument(std::string("state ") + std::string(to_string(s.label)) +
                                " has no spatial amplitude");
}

template <class F>
QuadratureResult refined(const QuadratureSpec &spec, F &&f) {
  spec.validate();
  QuadratureResult out;
  out.value = spherical_integral(spec, f);
  const double coarse = spherical_integral(spec.halved(), f);
  out.error_estimate = std::abs(out.value - coarse);
  out.converged = out.error_estimate <= 1e-6;
  return out;
}

} // namespace

std::string_view to_string(StateLabel label) {
  switch (label) {
  case StateLabel::S100: return "100";
  case StateLabel::P210: return "210";
  case StateLabel::SUpper: return "S_upper";
  case StateLabel::PMiddle: return "P_middle";
  case StateLabel::SGround: return "S_ground";
  }
  return "?";
}

EigenState EigenState::hydrogen_100(const PhysicalConstants<double> &k) {
  return {StateLabel::S100, -k.hartree() / 2.0 / k.hbar};
}

EigenState EigenState::hydrogen_210(const PhysicalConstants<double> &k) {
  return {StateLabel::P210, -k.hartree() / 8.0 / k.hbar};
}

double eval_eigenstate(const EigenState &state, double r, double theta) {
  if (!(r >= 0.0))
    throw std::domain_error("eval_eigenstate: radius must be non-negative");
  if (!(theta >= 0.0 && theta <= kPi))
    throw std::domain_error("eval_eigenstate: polar angle must lie in [0, pi]");
  require_spatial(state);
  return state.amplitude(r, theta);
}

double SuperpositionState::norm_squared() const {
  double s = 0.0;
  for (double a : amps)
    s += a * a;
  return s;
}

void SuperpositionState::validate(double tol) const {
  if (amps.size() < 2 || amps.size() > 3 || phases.size() != amps.size())
    throw std::invalid_argument("superposition needs 2 or 3 amplitudes with matching phases");
  for (double a : amps)
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("superposition amplitudes must lie in [0, 1]");
  if (std::abs(norm_squared() - 1.0) > tol)
    throw std::invalid_argument("superposition is not normalized: sum of squared amplitudes = " +
                                std::to_string(norm_squared()));
}

void QuadratureSpec::validate() const {
  if (!(radial_cutoff > 0.0) || radial_points < 2 * kRadialOrder || angular_points < 2)
    throw std::invalid_argument("invalid quadrature spec");
}

double ground_state_tail(double cutoff) {
  // 4 integral_R^inf r^2 e^{-2r} dr
  const double R = cutoff;
  return std::exp(-2.0 * R) * (2.0 * R * R + 2.0 * R + 1.0);
}

QuadratureResult norm_integral(const EigenState &s1, const EigenState &s2,
                               const QuadratureSpec &spec) {
  require_spatial(s1);
  require_spatial(s2);
  return refined(spec, [&](double r, double mu) {
    return hydrogen_amplitude(s1.label, r, mu) * hydrogen_amplitude(s2.label, r, mu);
  });
}

DipoleStrength dipole_strength(const EigenState &s1, const EigenState &s2,
                               const QuadratureSpec &spec, const PhysicalConstants<double> &k) {
  require_spatial(s1);
  require_spatial(s2);
  const auto moment = refined(spec, [&](double r, double mu) {
    return hydrogen_amplitude(s1.label, r, mu) * hydrogen_amplitude(s2.label, r, mu) * r * mu;
  });
  DipoleStrength d;
  d.q_a0 = 2.0 * moment.value;
  d.si = d.q_a0 * k.electron_charge * k.bohr_radius;
  d.error_estimate = 2.0 * moment.error_estimate;
  d.converged = moment.converged;
  return d;
}

SliceProfile mixed_density_slice(const SuperpositionState &state, double omega0_t,
                                 const Eigen::VectorXd &z_grid, const QuadratureSpec &spec) {
  state.validate();
  if (state.amps.size() != 2)
    throw std::invalid_argument("mixed_density_slice: two-component state required");
  spec.validate();

  const double a = state.amps[0], b = state.amps[1];
  const double cross_coeff = 2.0 * a * b * std::cos(omega0_t + state.relative_phase());
  const auto base = gauss_legendre<double>(kRadialOrder);
  const int panels = std::max(4, radial_panels(spec) / 2);

  SliceProfile p;
  p.z = z_grid;
  const Eigen::Index n = z_grid.size();
  p.ground.resize(n);
  p.excited.resize(n);
  p.cross.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Slice through the sphere: 2 pi integral_{|z|}^{cutoff} F(r, z / r) r dr.
    const double z = z_grid[i];
    const double lo = std::abs(z);
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    if (lo < spec.radial_cutoff) {
      const double width = (spec.radial_cutoff - lo) / panels;
      for (int pnl = 0; pnl < panels; ++pnl) {
        const double mid = lo + width * (pnl + 0.5);
        for (Eigen::Index j = 0; j < base.nodes.size(); ++j) {
          const double r = mid + 0.5 * width * base.nodes[j];
          const double w = 0.5 * width * base.weights[j] * r;
          const double mu = z / r;
          const double r1 = hydrogen_amplitude(StateLabel::S100, r, mu);
          const double r2 = hydrogen_amplitude(StateLabel::P210, r, mu);
          s11 += w * r1 * r1;
          s22 += w * r2 * r2;
          s12 += w * r1 * r2;
        }
      }
    }
    p.ground[i] = 2.0 * kPi * a * a * s11;
    p.excited[i] = 2.0 * kPi * b * b * s22;
    p.cross[i] = 2.0 * kPi * cross_coeff * s12;
  }
  p.total = p.ground + p.excited + p.cross;
  return p;
}

double integrate_sampled(const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
  const Eigen::Index n = x.size();
  if (y.size() != n)
    throw std::invalid_argument("integrate_sampled: size mismatch");
  if (n < 2)
    return 0.0;
  const double h = (x[n - 1] - x[0]) / double(n - 1);
  bool uniform = true;
  for (Eigen::Index i = 1; i < n && uniform; ++i)
    uniform = std::abs((x[i] - x[i - 1]) - h) <= 1e-9 * std::abs(h);
  if (uniform && (n - 1) % 2 == 0 && n >= 3) {
    double s = y[0] + y[n - 1];
    for (Eigen::Index i = 1; i < n - 1; ++i)
      s += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
    return s * h / 3.0;
  }
  double s = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

namespace {
double envelope(const SuperpositionState &state) {
  state.validate();
  if (state.amps.size() != 2)
    throw std::invalid_argument("dipole moment: two-component state required");
  return state.amps[0] * state.amps[1];
}
} // namespace

double dipole_moment(const SuperpositionState &state, double d12, double omega0, double t) {
  return d12 * envelope(state) * std::cos(omega0 * t + state.relative_phase());
}

double dipole_velocity(const SuperpositionState &state, double d12, double omega0, double t) {
  return -omega0 * d12 * envelope(state) * std::sin(omega0 * t + state.relative_phase());
}

double dipole_acceleration(const SuperpositionState &state, double d12, double omega0, double t) {
  return -omega0 * omega0 * d12 * envelope(state) * std::cos(omega0 * t + state.relative_phase());
}

TransitionEnergy transition_energy(const PhysicalConstants<double> &k) {
  TransitionEnergy e;
  e.rydberg_joules = 3.0 / 8.0 * k.hartree();
  e.rydberg_ev = e.rydberg_joules / k.electron_volt();
  e.printed_joules =
      9.0 * k.electron_charge * k.electron_charge / (128.0 * kPi * k.eps0 * k.bohr_radius);
  e.printed_ev = e.printed_joules / k.electron_volt();
  e.omega0 = e.rydberg_joules / k.hbar;
  e.omega0_printed = e.printed_joules / k.hbar;
  e.wavelength = 2.0 * kPi * k.c / e.omega0;
  e.relative_discrepancy = std::abs(e.printed_joules - e.rydberg_joules) / e.rydberg_joules;
  e.discrepancy = e.relative_discrepancy > 1e-6;
  return e;
}

} // namespace txn
