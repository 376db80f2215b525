#pragma once

#include <Eigen/Core>

#include <vector>

namespace txn {

struct Polyline {
  std::vector<Eigen::Vector2d> points;
  bool closed = false;
};

struct ContourSet {
  std::vector<Polyline> lines;
  /// Cells with two diagonal corner pairs on opposite sides of the level,
  /// as (row, col). They are resolved by the cell-centre average.
  std::vector<Eigen::Vector2i> saddle_cells;
  long skipped_cells = 0; // cells with a NaN corner
};

/// Marching squares on values(row, col) sampled at (x[col], y[row]).
/// Crossings are placed by linear interpolation along cell edges and the
/// segments are chained into polylines through shared edges.
ContourSet marching_squares(const Eigen::MatrixXd &values, const Eigen::VectorXd &x,
                            const Eigen::VectorXd &y, double level = 0.0);

} // namespace txn
