#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

namespace txn {

/// Two sources d12 apart, two detectors d_AB apart, planes a distance L apart.
struct HbtGeometry {
  double d12 = 1e-3;        // [m]
  double d_ab = 0.0;        // [m]
  double distance = 10.0;   // L [m]
  double wavelength = 5e-7; // [m]

  /// L must exceed 100 times both separations.
  bool far_field() const;
};

/// 1 + cos(2 pi d_AB d12 / (lambda L)).
double hbt_coincidence_rate(const HbtGeometry &g);

/// lambda L / d12
double hbt_fringe_period(const HbtGeometry &g);

/// Fringe period read off a uniform scan of d_AB over [0, max_dab]: the first
/// rate maximum after zero, refined by a parabola through its neighbours.
/// NaN if the scan holds no interior maximum.
double hbt_scanned_period(HbtGeometry g, double max_dab, int samples);

/// Polarizer angles and per-polarizer transmittances along the major and
/// minor axes.
struct PolarimeterPair {
  double theta1 = 0.0, theta2 = 0.0; // [rad]
  double eff_major1 = 1.0, eff_minor1 = 0.0;
  double eff_major2 = 1.0, eff_minor2 = 0.0;

  static PolarimeterPair symmetric(double phi, double eff_major = 1.0, double eff_minor = 0.0) {
    return {0.0, phi, eff_major, eff_minor, eff_major, eff_minor};
  }
  double phi() const { return theta2 - theta1; }
  void validate() const;
};

/// Coincidence probability with the shared axis locked to polarizer 2, scaled
/// so perfect polarizers give cos^2(phi):
/// (e1M e2m + e1m e2M) + (e1M - e1m)(e2M - e2m) cos^2(phi).
double fc_coincidence_ti(const PolarimeterPair &p);

struct MonteCarloEstimate {
  double value = 0.0;     // normalized: perfect polarizers at phi = 0 give 1
  double raw = 0.0;       // coincidence fraction
  double std_error = 0.0; // of `value`
  long samples = 0;
};

/// Random shared axis, independent leakage-model passage at each polarizer.
/// Normalized by 3/8, the perfect-polarizer fraction at phi = 0, so the
/// perfect-polarizer mean is (2 + cos 2 phi) / 3.
MonteCarloEstimate fc_coincidence_classical(const PolarimeterPair &p, long samples,
                                            std::uint64_t seed);

/// Closed form of the raw classical fraction for perfect polarizers.
inline double fc_classical_oracle(double phi) { return (2.0 + std::cos(2.0 * phi)) / 8.0; }

struct FcRow {
  double phi, ti, classical, classical_error;
};

/// Both models over a phi list; each phi uses its own derived seed.
std::vector<FcRow> fc_curve(const PolarimeterPair &base, const std::vector<double> &phi_values,
                            long samples, std::uint64_t seed);

/// A single emitter re-excited after each emission (dead time plus an
/// exponential wait) together with rare independent excitations of a second
/// atom. Each photon is lost with probability p_loss, otherwise it goes whole
/// to detector A or B with equal odds.
struct EmitterStream {
  double mean_interval = 12e-9;       // [s]
  double dead_time = 2e-9;            // [s]
  double background_interval = 5e-7;  // mean gap of second-atom excitations [s]
  double window = 1e-9;               // histogram bin width [s]
  double duration = 1e-2;             // [s]
  double p_loss = 0.5;
  double max_delay = 1e-7;            // histogram half-range [s]
  double plateau_delay = 6e-8;        // |delay| beyond this counts as plateau [s]
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct SplitPhotonResult {
  Eigen::VectorXd delays; // bin centres [s]
  Eigen::VectorXd counts;
  long primary_events = 0, background_events = 0;
  long detected_a = 0, detected_b = 0, lost = 0;
  double zero_bin = 0.0;
  double plateau = 0.0;         // mean count per plateau bin
  double accidental_oracle = 0.0; // expected zero-bin count
  bool degenerate = false;      // no detections at all
};

SplitPhotonResult split_photon_run(const EmitterStream &s);

/// Expected zero-delay bin count: only pairs involving at least one
/// second-atom photon can fall within half a window of each other.
double split_photon_accidentals(const EmitterStream &s);

} // namespace txn
