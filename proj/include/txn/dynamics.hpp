#pragma once

#include "txn/ode.hpp"

#include <Eigen/Core>

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace txn {

/// Default squared amplitude of the minority component of a state that is
/// "very small, but never zero".
inline constexpr double kDefaultSeed = 1e-6;

/// Emitter alpha hands its excitation to absorber beta.
/// Times are in the same unit as tau; the integrator works in t / tau.
struct TwoAtomScenario {
  double tau = 1.0;
  double t_start = 0.0;
  double t_end = 30.0;
  double initial_b2_alpha = 1.0 - kDefaultSeed;
  double phase_sin_phi = -1.0;
  int samples = 601;

  void validate() const;
};

/// One emitter, two recipients; beta2 is detuned by delta_omega (units 1/tau).
struct CompetitionScenario {
  double tau = 1.0;
  double delta_omega = 0.3;
  double seed_beta1 = kDefaultSeed;
  double seed_beta2 = kDefaultSeed;
  double t_start = -10.0;
  double t_end = 10.0;
  int samples = 401;

  void validate() const;
};

/// Three-level cascade c -> b -> a. Times in units of tau_alpha.
struct CascadeScenario {
  double tau_alpha = 1.5;
  double tau_beta = 1.0;
  double a2 = kDefaultSeed;
  double b2 = kDefaultSeed;
  double c2 = 1.0 - 2.0 * kDefaultSeed;
  double t_start = 0.0;
  double t_end = 50.0;
  int samples = 1001;

  void validate() const;
};

/// Sampled solution of one of the transaction ODEs. `values` has one row per
/// time sample and one column per entry of `columns`.
struct Trajectory {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::string> units;
  Eigen::VectorXd times;
  Eigen::MatrixXd values;
  /// Column groups whose entries must sum to one at every sample.
  std::vector<std::vector<std::string>> conserved;
  OdeStats stats;
  double max_clamp_excess = 0.0; // largest |sqrt argument| excursion outside [0, 1]
  bool clamp_diagnostic = false; // excursion beyond 1e-9
  std::map<std::string, std::string> metadata;

  Eigen::Index column(std::string_view name) const;
  Eigen::VectorXd series(std::string_view name) const { return values.col(column(name)); }
  double max_conservation_error() const;
};

/// Thrown when the integrator gives up; carries the samples reached so far.
class IntegrationFailure : public std::runtime_error {
public:
  IntegrationFailure(const std::string &what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory &partial() const { return partial_; }

private:
  Trajectory partial_;
};

/// Relative tolerance must lie in [1e-12, 1e-3].
Trajectory integrate_two_atom(const TwoAtomScenario &s, double tol = 1e-9);
Trajectory integrate_competition(const CompetitionScenario &s, double tol = 1e-9);
Trajectory integrate_cascade(const CascadeScenario &s, double tol = 1e-9);

struct TwoAtomAmplitudes {
  double b2_alpha, a2_alpha, b2_beta, a2_beta;
};

/// Closed-form logistic transfer with its midpoint at t_offset.
TwoAtomAmplitudes analytic_two_atom(double t, double tau, double t_offset = 0.0);

/// Midpoint time of the logistic passing through b2_alpha = b2 at time t.
double logistic_offset(double t, double b2, double tau);

/// Time at which `name` first crosses `level`, interpolated linearly between
/// samples. NaN if never crossed.
double crossing_time(const Trajectory &traj, std::string_view name, double level);

/// Time of the largest sample of `name`, refined by a parabola through the
/// neighbouring samples.
double peak_time(const Trajectory &traj, std::string_view name);

} // namespace txn
