#pragma once

#include "txn/contour.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <vector>

namespace txn {

/// Lengths in units of lambda / 2 pi, times in units of 1 / omega0, c = 1.
struct GridSpec {
  double x_min = -5.0, x_max = 17.0;
  double y_min = -10.0, y_max = 10.0;
  int nx = 801, ny = 401;

  Eigen::VectorXd x_coords() const;
  /// Exactly mirror-symmetric when y_min == -y_max.
  Eigen::VectorXd y_coords() const;
  void validate() const;
};

/// Emitter alpha at the origin radiating retarded waves, absorber beta at
/// (separation, 0) answering with advanced waves.
struct HandshakeFieldConfig {
  double separation = 12.0;
  std::vector<double> times = {0.0};
  GridSpec grid;
  double envelope_rate = 1.0;  // 1/tau: common amplitude of both terms
  double alpha_amplitude = 1.0;
  double beta_amplitude = 1.0;
  double exclusion_radius = 0.05;

  /// Default grid spans [-5, separation + 5] x [-10, 10].
  static HandshakeFieldConfig with_separation(double separation);
  void validate() const;
};

/// Total potential and its time derivative at a point (z = 0 for the plane),
/// ignoring the exclusion discs. Singular only at the atoms themselves.
double handshake_potential_raw(const HandshakeFieldConfig &cfg, double x, double y, double z,
                               double t);
double handshake_time_derivative(const HandshakeFieldConfig &cfg, double x, double y, double z,
                                 double t);

/// A_total in the x-y plane, or nullopt inside an exclusion disc.
std::optional<double> eval_handshake_potential(const HandshakeFieldConfig &cfg, double x,
                                               double y, double t);

bool in_exclusion(const HandshakeFieldConfig &cfg, double x, double y, double z = 0.0);

/// Frames indexed (row = y, col = x); excluded samples hold NaN.
struct FieldGrid {
  Eigen::VectorXd x, y;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> frames;
  /// On-axis interference maxima between the atoms, per frame.
  std::vector<std::vector<double>> axis_maxima;
};

FieldGrid field_movie(const HandshakeFieldConfig &cfg);

/// Positions of local maxima of A(x, 0, t) strictly between the atoms,
/// at least `margin` away from each, refined by a parabola on a fine scan.
std::vector<double> axis_maxima(const HandshakeFieldConfig &cfg, double t, double margin = 0.5);

/// Frame-to-frame tracking of the on-axis maxima.
struct MaximaTracking {
  long tracked_steps = 0;  // matched maxima between consecutive frames
  long forward_steps = 0;  // of those, moved toward beta
  double min_displacement = 0.0;
  bool monotone() const { return tracked_steps > 0 && forward_steps == tracked_steps; }
};

/// Matches each maximum to the nearest one in the next frame. Consecutive
/// frames must be closer in time than a quarter period for this to be
/// unambiguous.
MaximaTracking track_axis_maxima(const FieldGrid &movie);

/// Zero level set of A_total at time t on the configured grid.
ContourSet zero_crossing_contours(const HandshakeFieldConfig &cfg, double t);

/// Energy flux S = -(dA/dt) grad A of the scalar wave A. In the plane z = 0
/// this is E x B for A along z. The gradient uses a fourth-order central
/// stencil of width `h`.
Eigen::Vector3d poynting(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &p, double t,
                         double h = 1e-3);

/// Average of poynting() over one optical period starting at t0 (exact for
/// the second harmonics present when phases >= 3).
Eigen::Vector3d poynting_average(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &p,
                                 double t0 = 0.0, int phases = 16);

enum class StreamEnd { LeftGrid, ReachedAlpha, ReachedBeta, Stagnation, MaxLength, Failure };

const char *to_string(StreamEnd e);

struct Streamline {
  std::vector<Eigen::Vector2d> points;
  StreamEnd end = StreamEnd::MaxLength;
  double length = 0.0;
};

struct StreamlineOptions {
  bool time_averaged = true;
  double t = 0.0;            // instant for snapshots, phase origin for averages
  double max_length = 200.0;
  double tolerance = 1e-8;
  double stagnation = 1e-12; // |S| below this stops the line
};

/// Integrates dp/ds = S / |S| in the plane from each seed until the line leaves
/// the grid, enters an exclusion disc, stagnates or exceeds max_length.
std::vector<Streamline> poynting_streamlines(const HandshakeFieldConfig &cfg,
                                             const std::vector<Eigen::Vector2d> &seeds,
                                             const StreamlineOptions &opts = {});

struct FluxBalance {
  double net = 0.0;   // outward flux of the time-averaged S
  double gross = 0.0; // integral of |S . n| over the surface
  double relative() const { return gross > 0.0 ? std::abs(net) / gross : 0.0; }
};

/// Closed-surface flux of the time-averaged Poynting vector through the cube
/// of half-width `half` centred at `centre`, by Gauss-Legendre on each face.
FluxBalance box_flux(const HandshakeFieldConfig &cfg, const Eigen::Vector3d &centre, double half,
                     int order = 24);

/// Maxima of |A(t)| along the perpendicular bisector x = separation / 2,
/// y > 0, with their two-leg path lengths 2 r.
struct LobePhases {
  std::vector<double> y;
  std::vector<double> path_lengths;
  /// Largest deviation of successive path-length differences from a whole
  /// number of cycles, in cycles.
  double max_cycle_error = 0.0;
};

LobePhases bisector_lobe_phases(const HandshakeFieldConfig &cfg, double t = 0.0,
                                double y_max = 10.0);

} // namespace txn
