#pragma once

#include "txn/constants.hpp"

#include <optional>

namespace txn {

/// Free-space coupling rate constant mu0 omega0^3 d12^2 / (8 pi r).
/// d12 in [C m], omega0 in [rad/s], r in [m]; result in [W].
double coupling_power(double d12, double omega0, double r,
                      const PhysicalConstants<double> &k = codata2018());

/// Transition time r c^2 / (4 a0^3 omega0^3) in seconds, with omega0 the
/// Rydberg 2p -> 1s value. With a solid angle [sr] the result is divided by
/// the optical enhancement factor 8 r / (pi lambda) * solid_angle.
double transition_time(double r, const PhysicalConstants<double> &k = codata2018(),
                       std::optional<double> solid_angle = std::nullopt);

/// tau = E0 / (P / 4): the energy over the coupling power with the peak
/// transfer factor ab ab = 1/4 applied. d12 in [C m], energy in [J].
double transition_time_from_power(double d12, double energy, double omega0, double r,
                                  const PhysicalConstants<double> &k = codata2018());

/// Cycle-averaged power delivered by a field E cos(theta) to a dipole whose
/// velocity is -V sin(theta + phase), from a periodic trapezoid sum over one
/// cycle. The closed form is -E V sin(phase) / 2.
double per_cycle_work(double field_amplitude, double velocity_envelope, double phase,
                      int points = 64);

inline double per_cycle_work_closed(double field_amplitude, double velocity_envelope,
                                    double phase) {
  return -0.5 * field_amplitude * velocity_envelope * std::sin(phase);
}

} // namespace txn
