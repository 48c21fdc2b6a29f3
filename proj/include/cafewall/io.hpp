#pragma once

#include <filesystem>
#include <string>

#include "cafewall/hough.hpp"
#include "cafewall/image.hpp"

namespace cafewall {

/// 8-bit grayscale PNG; luminance v is stored as round(255 v).
void write_gray_png(const std::filesystem::path& path, const GrayImage& image);

/// Reads any PNG as 8-bit gray (colour is converted, alpha composited on black).
GrayImage read_gray_png(const std::filesystem::path& path);

/// 1-bit PNG, edge pixels white.
void write_edge_png(const std::filesystem::path& path, const EdgeMap& edges);
/// Nonzero pixels of any PNG become edge pixels.
EdgeMap read_edge_png(const std::filesystem::path& path);

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);

/// Affine map from 16-bit codes back to response values: value = offset + scale * code.
struct ResponseScaling {
  double offset = 0.0;
  double scale = 0.0;
  friend bool operator==(const ResponseScaling&, const ResponseScaling&) = default;
};

/// 16-bit PNG spanning [min, max] of the response, plus a sidecar
/// `<path>.scale.txt` holding the offset and scale.
ResponseScaling write_response_png(const std::filesystem::path& path, const ResponseMap& response);
/// Reads a 16-bit response PNG and its sidecar.
ResponseMap read_response_png(const std::filesystem::path& path);
std::filesystem::path response_sidecar_path(const std::filesystem::path& png_path);

/// Raw float grid: ASCII header "CWGRID f64 <width> <height>\n" followed by
/// width * height little-endian doubles, row-major.
void write_raw_grid(const std::filesystem::path& path, const ResponseMap& response);
ResponseMap read_raw_grid(const std::filesystem::path& path);

/// Accumulator as a 16-bit heatmap, theta along x and rho along y, votes scaled
/// so the largest bin maps to 65535.
void write_accumulator_png(const std::filesystem::path& path, const HoughAccumulator& acc);

/// Writes `text` verbatim, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cafewall
