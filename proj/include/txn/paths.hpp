#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace txn {

struct ExactAndApprox {
  double exact;
  double approx;
};

/// Two-segment length via the mid-plane point at offset y:
/// exact 2 sqrt((r/2)^2 + y^2) and the quadratic form r + 2 y^2 / r.
ExactAndApprox path_length(double r, double y);

/// Offset of the quarter-wave zone edge, where 2 y^2 / r = lambda / 4.
inline double zone_edge(double r, double wavelength) { return std::sqrt(wavelength * r / 8.0); }

/// Thrown when adjacent paths differ in phase by pi/4 or more, or the offsets
/// are not symmetric.
class SamplingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Source at (0, 0), detector at (distance, 0), paths bend at x = screen_x.
struct PathEnsemble {
  double distance = 1.0;
  double screen_x = 0.5;
  std::vector<double> offsets; // sorted ascending
  std::vector<double> weights; // per-path arrow length; empty means unit arrows
  double wavelength = 1.0;
  /// Extra optical path (same length unit) added to path j, e.g. glass.
  std::function<double(double offset, double geometric_length)> delay;

  /// Evenly spaced symmetric offsets in [-half_width, half_width], mid-plane screen.
  static PathEnsemble uniform(double distance, double wavelength, double half_width, int count);

  double geometric_length(double y) const;
  double optical_length(double y) const;
};

struct PhasorOptions {
  bool require_symmetric = true;
  bool check_sampling = true;
};

struct PhasorResultant {
  std::vector<std::complex<double>> arrows;
  std::complex<double> resultant;
  std::vector<std::complex<double>> partial_sums; // the "seahorse" curve
  double amplitude = 0.0;     // |resultant|
  double arrow_total = 0.0;   // sum of |arrow|
  double max_phase_step = 0.0;
};

PhasorResultant phasor_sum(const PathEnsemble &e, const PhasorOptions &opts = {});

/// Delay that makes every path optically as long as the straight one.
std::function<double(double, double)> equal_delay_lens(double distance);

/// Ring-weighted ensemble used for the distance study. Paths are spaced
/// uniformly in the source angle theta; each +-offset pair stands for the ring
/// of solid angle 2 pi sin(theta) dtheta and carries a Gaussian taper
/// exp(-theta^2 / taper^2) that suppresses the aperture edge.
struct RingSampling {
  double theta_step = 0.0; // 0: choose from the largest distance by the pi/4 rule
  double theta_max = 0.8;
  double taper = 0.2;
};

PathEnsemble ring_ensemble(double distance, double wavelength, const RingSampling &s);

/// Angle step that keeps the phase step below pi/4 (with a 10% margin) out to
/// theta_max at the given distance.
double ring_theta_step(double distance, double wavelength, double theta_max);

struct DistanceStudy {
  Eigen::VectorXd distances;
  Eigen::VectorXd amplitudes;
  double slope = 0.0;           // fitted d log|A| / d log r
  double intercept = 0.0;
  double intensity_slope = 0.0; // same for |A|^2
  double theta_step = 0.0;
  std::vector<long> path_counts;
};

DistanceStudy amplitude_vs_distance(const std::vector<double> &distances, double wavelength,
                                    RingSampling sampling = {});

/// Zone analysis of one resultant. "Contribution" of the paths with
/// |y| <= h is the projection of their partial sum onto the direction of the
/// full resultant.
struct ZoneAnalysis {
  double edge = 0.0;             // sqrt(lambda r / 8)
  double half_width_80 = 0.0;    // smallest h contributing 80% of |resultant|
  double width_ratio = 0.0;      // half_width_80 / edge
  double inner_projection = 0.0; // fraction from |y| <= edge
  double outer_projection = 0.0; // fraction from |y| > edge
  double outer_magnitude = 0.0;  // |sum over |y| > edge| / |resultant|
};

ZoneAnalysis zone_analysis(const PathEnsemble &e);

/// Optical enhancement 8 r / (pi lambda) * solid_angle.
double enhancement_factor(double r, double wavelength, double solid_angle);

/// Least-squares slope and intercept of log(y) against log(x).
std::pair<double, double> loglog_fit(const Eigen::VectorXd &x, const Eigen::VectorXd &y);

} // namespace txn
