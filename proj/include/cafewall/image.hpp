#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cafewall/error.hpp"

namespace cafewall {

/// Row-major 2-D raster. Coordinates are (x = column, y = row), y grows downward.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw ParameterError("raster: negative dimensions");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0) throw ParameterError("raster: negative dimensions");
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw ParameterError("raster: data length must equal width * height");
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] const T& operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  [[nodiscard]] T& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  [[nodiscard]] std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  [[nodiscard]] std::span<T> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  [[nodiscard]] std::span<const T> data() const noexcept { return data_; }
  [[nodiscard]] std::span<T> data() noexcept { return data_; }
  [[nodiscard]] const std::vector<T>& values() const noexcept { return data_; }

  /// Left-right mirror image.
  [[nodiscard]] Raster mirrored() const {
    Raster out(width_, height_);
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x) out(width_ - 1 - x, y) = (*this)(x, y);
    return out;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Luminance raster with every value in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> data);

  [[nodiscard]] int width() const noexcept { return raster_.width(); }
  [[nodiscard]] int height() const noexcept { return raster_.height(); }
  [[nodiscard]] double operator()(int x, int y) const noexcept { return raster_(x, y); }
  [[nodiscard]] std::span<const double> row(int y) const noexcept { return raster_.row(y); }
  [[nodiscard]] std::span<const double> data() const noexcept { return raster_.data(); }
  [[nodiscard]] const Raster<double>& raster() const noexcept { return raster_; }

  [[nodiscard]] GrayImage mirrored() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  explicit GrayImage(Raster<double> r) : raster_(std::move(r)) {}
  Raster<double> raster_;
};

/// Signed filter response, same geometry as the filtered image.
using ResponseMap = Raster<double>;

/// Binary edge map; 1 marks an edge pixel.
using EdgeMap = Raster<std::uint8_t>;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
using RgbImage = Raster<Rgb>;

struct CropWindow {
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

/// Exact copy of `window`; throws RangeError unless the window lies inside the image.
GrayImage crop(const GrayImage& image, const CropWindow& window);

/// Number of edge pixels.
std::size_t count_edges(const EdgeMap& edges) noexcept;

}  // namespace cafewall
