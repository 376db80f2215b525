#pragma once

#include "txn/constants.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace txn {

enum class StateLabel {
  S100,
  P210,
  // Levels of the three-level cascade. They carry a frequency but no spatial
  // amplitude; the cascade is modelled through its amplitudes only.
  SUpper,
  PMiddle,
  SGround,
};

std::string_view to_string(StateLabel label);

/// Real spatial amplitude R(r, theta) of a hydrogen eigenstate, with r in Bohr
/// radii. Only the 100 and 210 states have a closed form here.
template <typename Scalar>
Scalar hydrogen_amplitude(StateLabel label, Scalar r, Scalar cos_theta) {
  using std::exp;
  using std::sqrt;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  switch (label) {
  case StateLabel::S100:
    return exp(-r) / sqrt(pi);
  case StateLabel::P210:
    return r * exp(-r / Scalar(2)) * cos_theta / (Scalar(4) * sqrt(Scalar(2) * pi));
  default:
    throw std::invalid_argument("hydrogen_amplitude: cascade levels have no spatial amplitude");
  }
}

/// A stationary state: label plus angular frequency omega = E / hbar.
struct EigenState {
  StateLabel label = StateLabel::S100;
  double omega = 0.0; // [rad/s]

  bool has_amplitude() const { return label == StateLabel::S100 || label == StateLabel::P210; }

  double amplitude(double r, double theta) const {
    return hydrogen_amplitude<double>(label, r, std::cos(theta));
  }

  static EigenState hydrogen_100(const PhysicalConstants<double> &k = codata2018());
  static EigenState hydrogen_210(const PhysicalConstants<double> &k = codata2018());
};

/// Amplitude of `state` at dimensionless radius r (units of a0) and polar angle
/// theta. Throws std::domain_error for r < 0 or theta outside [0, pi].
double eval_eigenstate(const EigenState &state, double r, double theta);

/// Normalized superposition sum_i amps[i] e^{i phases[i]} R_i e^{-i omega_i t}.
/// The relative phase of a two-component state is phases[0] - phases[1].
struct SuperpositionState {
  std::vector<double> amps;
  std::vector<double> phases;

  static SuperpositionState two_level(double a, double b, double phi = 0.0) {
    return {{a, b}, {phi, 0.0}};
  }

  double norm_squared() const;
  double relative_phase() const { return phases.at(0) - phases.at(1); }
  /// Throws std::invalid_argument unless amps are in [0, 1] and sum to one.
  void validate(double tol = 1e-12) const;
};

struct QuadratureSpec {
  double radial_cutoff = 40.0; // [a0]
  int radial_points = 2000;
  int angular_points = 200;

  QuadratureSpec halved() const {
    return {radial_cutoff, radial_points / 2, angular_points / 2};
  }
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  /// |I(spec) - I(spec.halved())|
  double error_estimate = 0.0;
  bool converged = true;
};

/// Radial tail of the ground state beyond `cutoff`: integral of R_100^2 over
/// r > cutoff, in closed form.
double ground_state_tail(double cutoff);

/// Overlap integral of R_1 R_2 over all space.
QuadratureResult norm_integral(const EigenState &s1, const EigenState &s2,
                               const QuadratureSpec &spec = {});

struct DipoleStrength {
  double q_a0 = 0.0;  // in units of q a0
  double si = 0.0;    // [C m]
  double error_estimate = 0.0;
  bool converged = true;
};

/// d12 = 2 q integral R_1 R_2 z dvol.
DipoleStrength dipole_strength(const EigenState &s1, const EigenState &s2,
                               const QuadratureSpec &spec = {},
                               const PhysicalConstants<double> &k = codata2018());

/// Charge in x-y slices of a two-component superposition, decomposed into the
/// a^2 R1^2, b^2 R2^2 and oscillating 2ab R1 R2 cos(omega0 t + phi) terms.
struct SliceProfile {
  Eigen::VectorXd z;
  Eigen::VectorXd ground;
  Eigen::VectorXd excited;
  Eigen::VectorXd cross;
  Eigen::VectorXd total;
};

/// `z_grid` in units of a0; `omega0_t` is the dimensionless optical phase
/// omega0 * t.
SliceProfile mixed_density_slice(const SuperpositionState &state, double omega0_t,
                                 const Eigen::VectorXd &z_grid, const QuadratureSpec &spec = {});

/// Integral of sampled values over a sorted grid: Simpson when the grid is
/// uniform with an even number of intervals, trapezoid otherwise.
double integrate_sampled(const Eigen::VectorXd &x, const Eigen::VectorXd &y);

/// q<z> = d12 a b cos(omega0 t + phi), plus the slow-envelope velocity and
/// acceleration forms.
double dipole_moment(const SuperpositionState &state, double d12, double omega0, double t);
double dipole_velocity(const SuperpositionState &state, double d12, double omega0, double t);
double dipole_acceleration(const SuperpositionState &state, double d12, double omega0, double t);

struct TransitionEnergy {
  double rydberg_joules = 0.0; // (3/8) Hartree, the 2p -> 1s energy
  double rydberg_ev = 0.0;
  double printed_joules = 0.0; // 9 q^2 / (128 pi eps0 a0)
  double printed_ev = 0.0;
  double omega0 = 0.0;         // from the Rydberg value [rad/s]
  double omega0_printed = 0.0;
  double wavelength = 0.0;     // 2 pi c / omega0 [m]
  double relative_discrepancy = 0.0;
  bool discrepancy = false;
};

TransitionEnergy transition_energy(const PhysicalConstants<double> &k = codata2018());

} // namespace txn
