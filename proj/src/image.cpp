#include "cafewall/image.hpp"

#include <algorithm>
#include <string>

namespace cafewall {

namespace {

void check_unit_range(std::span<const double> values) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ParameterError("GrayImage: luminance " + std::to_string(v) + " outside [0, 1]");
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill) : raster_(width, height, fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) throw ParameterError("GrayImage: fill outside [0, 1]");
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : raster_(width, height, std::move(data)) {
  check_unit_range(raster_.data());
}

GrayImage GrayImage::mirrored() const { return GrayImage(raster_.mirrored()); }

GrayImage crop(const GrayImage& image, const CropWindow& w) {
  if (w.width <= 0 || w.height <= 0) throw RangeError("crop: window must have positive size");
  if (w.left < 0 || w.top < 0 || w.left + w.width > image.width() ||
      w.top + w.height > image.height()) {
    throw RangeError("crop: window (" + std::to_string(w.left) + "," + std::to_string(w.top) +
                     " " + std::to_string(w.width) + "x" + std::to_string(w.height) +
                     ") exceeds image " + std::to_string(image.width()) + "x" +
                     std::to_string(image.height()));
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w.width) * w.height);
  for (int y = w.top; y < w.top + w.height; ++y) {
    auto r = image.row(y).subspan(static_cast<std::size_t>(w.left), static_cast<std::size_t>(w.width));
    out.insert(out.end(), r.begin(), r.end());
  }
  return GrayImage(w.width, w.height, std::move(out));
}

std::size_t count_edges(const EdgeMap& edges) noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges.data().begin(), edges.data().end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace cafewall
