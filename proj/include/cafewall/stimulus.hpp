#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cafewall/image.hpp"

namespace cafewall {

/// Parametric Café Wall: rows of alternating dark/light square tiles separated by
/// horizontal mortar strips, with alternate rows shifted horizontally.
struct CafeWallSpec {
  int rows = 3;
  int cols = 8;
  int tile_px = 200;
  int mortar_px = 8;
  double tile_dark = 0.0;
  double tile_light = 1.0;
  double mortar_lum = 0.5;
  int row_shift_px = 100;

  /// Wall with the default half-tile shift and default luminances.
  static CafeWallSpec make(int rows, int cols, int tile_px, int mortar_px);

  /// Throws ParameterError naming the first violated invariant.
  void validate() const;

  [[nodiscard]] int width() const noexcept { return cols * tile_px; }
  [[nodiscard]] int height() const noexcept { return rows * tile_px + (rows - 1) * mortar_px; }

  /// Top pixel row of tile row `r`.
  [[nodiscard]] int row_top(int r) const noexcept { return r * (tile_px + mortar_px); }
  /// Top pixel row of the mortar between tile rows `m` and `m + 1`.
  [[nodiscard]] int mortar_top(int m) const noexcept { return row_top(m) + tile_px; }

  /// Pixel height of a crop covering `n` whole tile rows and the n-1 mortars between them.
  [[nodiscard]] int rows_height(int n) const noexcept { return n * tile_px + (n - 1) * mortar_px; }

  friend bool operator==(const CafeWallSpec&, const CafeWallSpec&) = default;
};

/// Horizontal phase of each tile row in [0, 2T). Tile k of a row covers
/// [phase + kT, phase + (k+1)T) and is dark for even k, so a phase of T swaps the
/// colours. Columns left of the phase wrap the sequence.
using RowPhases = std::vector<int>;

/// Default layout: even rows at phase 0, odd rows at row_shift_px.
RowPhases default_row_phases(const CafeWallSpec& spec);

/// Phases that reproduce the left-right mirror of a wall rendered with `phases`.
RowPhases mirrored_row_phases(const CafeWallSpec& spec, const RowPhases& phases);

GrayImage generate_cafe_wall(const CafeWallSpec& spec);
GrayImage generate_cafe_wall(const CafeWallSpec& spec, const RowPhases& phases);

enum class MortarKind { Falling, Rising };

std::string to_string(MortarKind kind);

/// Tilt direction induced along mortar `m` (between rows m and m+1). With d the
/// rightward displacement of the row below relative to the row above, modulo 2T,
/// the mortar is Rising for 0 < d < T and Falling for T < d < 2T (the lower row
/// leads to the left). Aligned rows (d = 0 or T) induce no tilt and yield nullopt.
std::optional<MortarKind> mortar_kind(const CafeWallSpec& spec, const RowPhases& phases, int m);
std::optional<MortarKind> mortar_kind(const CafeWallSpec& spec, int m);

// ---------------------------------------------------------------------------
// Sampling

enum class SamplingMethod { Systematic, Random, MortarCentered };

struct SampleSet {
  SamplingMethod method = SamplingMethod::Random;
  std::optional<MortarKind> mortar;  ///< set for MortarCentered
  std::optional<int> mortar_index;   ///< mortar the windows are centred on
  int source_width = 0;
  int source_height = 0;
  int step_px = 0;  ///< horizontal offset between consecutive windows (0 for Random)
  std::uint64_t seed = 0;
  std::vector<CropWindow> windows;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Identifier of the generator behind every randomized sampler.
inline constexpr const char* kRngAlgorithm = "mt19937_64+rejection";

std::string to_string(SamplingMethod method);

/// Width x height of a crop covering rows_tiles x cols_tiles tiles.
struct CropDims {
  int width = 0;
  int height = 0;
  friend bool operator==(const CropDims&, const CropDims&) = default;
};
CropDims crop_dims_for_tiles(const CafeWallSpec& spec, int rows_tiles, int cols_tiles);

struct ImageDims {
  int width = 0;
  int height = 0;
};

/// `count` windows of (2T+M) x 4.5T vertically centred on the first mortar of
/// `kind`, starting flush left and advancing by `offset_px`.
SampleSet mortar_centered_windows(const CafeWallSpec& spec, MortarKind kind, int count, int offset_px);

/// First window at a seeded random position; each following window moves right by step_px.
SampleSet systematic_windows(ImageDims image, CropDims crop, int count, int step_px, std::uint64_t seed);

/// Windows drawn uniformly over every in-bounds top-left position.
SampleSet random_windows(ImageDims image, CropDims crop, int count, std::uint64_t seed);

}  // namespace cafewall
