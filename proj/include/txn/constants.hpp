#pragma once

#include <cmath>
#include <numbers>

namespace txn {

/// SI physical constants used throughout. Values are CODATA 2018; q, hbar and c
/// are exact in the 2019 SI.
template <typename Scalar = double>
struct PhysicalConstants {
  Scalar bohr_radius;     // a0 [m]
  Scalar electron_charge; // q [C]
  Scalar electron_mass;   // m [kg]
  Scalar hbar;            // [J s]
  Scalar c;               // [m/s]
  Scalar mu0;             // [H/m]
  Scalar eps0;            // [F/m]

  /// a0 = 4 pi eps0 hbar^2 / (m q^2)
  Scalar derived_bohr_radius() const {
    return Scalar(4) * std::numbers::pi_v<Scalar> * eps0 * hbar * hbar /
           (electron_mass * electron_charge * electron_charge);
  }

  /// Hartree energy q^2 / (4 pi eps0 a0) [J].
  Scalar hartree() const {
    return electron_charge * electron_charge /
           (Scalar(4) * std::numbers::pi_v<Scalar> * eps0 * bohr_radius);
  }

  Scalar electron_volt() const { return electron_charge; }
};

template <typename Scalar = double>
constexpr PhysicalConstants<Scalar> codata2018() {
  return PhysicalConstants<Scalar>{
      Scalar(5.29177210903e-11),
      Scalar(1.602176634e-19),
      Scalar(9.1093837015e-31),
      Scalar(1.054571817e-34),
      Scalar(299792458.0),
      Scalar(1.25663706212e-6),
      Scalar(8.8541878128e-12),
  };
}

} // namespace txn
