#pragma once

#include <Eigen/Core>

#include <filesystem>

namespace txn {

/// Writes values(row, col) as an RGB PNG with row 0 at the bottom, using a
/// blue-white-red map symmetric about zero. The scale is the 99th percentile
/// of |value| so that the 1/r spikes near the atoms do not wash out the
/// picture. NaN samples are drawn grey.
void write_png(const std::filesystem::path &path, const Eigen::MatrixXd &values);

} // namespace txn
