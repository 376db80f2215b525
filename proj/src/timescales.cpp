#include "txn/timescales.hpp"

#include "txn/atomic_states.hpp"
#include "txn/paths.hpp"

#include <numbers>
#include <stdexcept>

namespace txn {

namespace {
constexpr double kPi = std::numbers::pi;
}

double coupling_power(double d12, double omega0, double r, const PhysicalConstants<double> &k) {
  if (!(r > 0.0))
    throw std::invalid_argument("coupling_power: separation must be positive");
  return k.mu0 * omega0 * omega0 * omega0 * d12 * d12 / (8.0 * kPi * r);
}

double transition_time(double r, const PhysicalConstants<double> &k,
                       std::optional<double> solid_angle) {
  if (!(r > 0.0))
    throw std::invalid_argument("transition_time: separation must be positive");
  const auto e = transition_energy(k);
  const double a0 = k.bohr_radius, w = e.omega0;
  double tau = r * k.c * k.c / (4.0 * a0 * a0 * a0 * w * w * w);
  if (solid_angle) {
    if (!(*solid_angle > 0.0 && *solid_angle <= 4.0 * kPi))
      throw std::invalid_argument("transition_time: solid angle must lie in (0, 4 pi]");
    tau /= enhancement_factor(r, e.wavelength, *solid_angle);
  }
  return tau;
}

double transition_time_from_power(double d12, double energy, double omega0, double r,
                                  const PhysicalConstants<double> &k) {
  return energy / (coupling_power(d12, omega0, r, k) / 4.0);
}

double per_cycle_work(double field_amplitude, double velocity_envelope, double phase,
                      int points) {
  if (points < 3)
    throw std::invalid_argument("per_cycle_work: need at least three points");
  // Trapezoid on a periodic integrand is spectrally accurate.
  double s = 0.0;
  for (int i = 0; i < points; ++i) {
    const double th = 2.0 * kPi * double(i) / double(points);
    s += field_amplitude * std::cos(th) * (-velocity_envelope * std::sin(th + phase));
  }
  return s / double(points);
}

} // namespace txn
