#include "raster.hpp"

#include "txn/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace txn {

void write_png(const std::filesystem::path &path, const Eigen::MatrixXd &values) {
  const auto rows = values.rows(), cols = values.cols();
  std::vector<double> mags;
  mags.reserve(std::size_t(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (!std::isnan(values.data()[i]))
      mags.push_back(std::abs(values.data()[i]));
  double scale = 1.0;
  if (!mags.empty()) {
    const auto k = std::size_t(0.99 * double(mags.size() - 1));
    std::nth_element(mags.begin(), mags.begin() + std::ptrdiff_t(k), mags.end());
    scale = mags[k] > 0.0 ? mags[k] : 1.0;
  }

  std::vector<std::uint8_t> rgb(std::size_t(rows * cols * 3));
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::uint8_t *px = &rgb[std::size_t(((rows - 1 - r) * cols + c) * 3)];
      const double v = values(r, c);
      if (std::isnan(v)) {
        px[0] = px[1] = px[2] = 128;
        continue;
      }
      const double s = std::clamp(v / scale, -1.0, 1.0);
      const auto fade = std::uint8_t(std::lround(255.0 * (1.0 - std::abs(s))));
      if (s >= 0) {
        px[0] = 255;
        px[1] = px[2] = fade;
      } else {
        px[2] = 255;
        px[0] = px[1] = fade;
      }
    }

  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = png_uint_32(cols);
  img.height = png_uint_32(rows);
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, rgb.data(), 0, nullptr))
    throw IoError("png write failed for " + path.string() + ": " + img.message);
}

} // namespace txn
