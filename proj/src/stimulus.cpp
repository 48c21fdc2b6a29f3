#include "cafewall/stimulus.hpp"

#include <string>

#include "random.hpp"

namespace cafewall {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int positive_mod(int a, int b) {
  const int r = a % b;
  return r < 0 ? r + b : r;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError("CafeWallSpec: " + what);
}

}  // namespace

CafeWallSpec CafeWallSpec::make(int rows, int cols, int tile_px, int mortar_px) {
  CafeWallSpec s;
  s.rows = rows;
  s.cols = cols;
  s.tile_px = tile_px;
  s.mortar_px = mortar_px;
  s.row_shift_px = tile_px / 2;
  return s;
}

void CafeWallSpec::validate() const {
  require(rows >= 1, "rows must be >= 1");
  require(cols >= 1, "cols must be >= 1");
  require(tile_px >= 1, "tile_px must be >= 1");
  require(mortar_px >= 0, "mortar_px must be >= 0");
  require(tile_dark >= 0.0, "tile_dark must be >= 0");
  require(tile_dark < mortar_lum, "mortar_lum must exceed tile_dark");
  require(mortar_lum < tile_light, "tile_light must exceed mortar_lum");
  require(tile_light <= 1.0, "tile_light must be <= 1");
  require(row_shift_px >= 0 && row_shift_px < tile_px, "row_shift_px must lie in [0, tile_px)");
}

RowPhases default_row_phases(const CafeWallSpec& spec) {
  RowPhases phases(static_cast<std::size_t>(spec.rows));
  for (int r = 0; r < spec.rows; ++r) phases[static_cast<std::size_t>(r)] = (r % 2 == 0) ? 0 : spec.row_shift_px;
  return phases;
}

RowPhases mirrored_row_phases(const CafeWallSpec& spec, const RowPhases& phases) {
  // Mirroring x -> W-1-x maps tile index k to -k' with phase W - p - T; parity is
  // unaffected by the sign, so only the phase (mod 2T) changes.
  const int period = 2 * spec.tile_px;
  RowPhases out(phases.size());
  for (std::size_t r = 0; r < phases.size(); ++r)
    out[r] = positive_mod(spec.width() - phases[r] - spec.tile_px, period);
  return out;
}

GrayImage generate_cafe_wall(const CafeWallSpec& spec) {
  spec.validate();
  return generate_cafe_wall(spec, default_row_phases(spec));
}

GrayImage generate_cafe_wall(const CafeWallSpec& spec, const RowPhases& phases) {
  spec.validate();
  if (phases.size() != static_cast<std::size_t>(spec.rows))
    throw ParameterError("generate_cafe_wall: one phase per tile row required");

  const int width = spec.width();
  const int height = spec.height();
  const int T = spec.tile_px;
  std::vector<double> data(static_cast<std::size_t>(width) * height, spec.mortar_lum);

  std::vector<double> line(static_cast<std::size_t>(width));
  for (int r = 0; r < spec.rows; ++r) {
    const int phase = phases[static_cast<std::size_t>(r)];
    for (int x = 0; x < width; ++x) {
      const int k = floor_div(x - phase, T);
      line[static_cast<std::size_t>(x)] = (positive_mod(k, 2) == 0) ? spec.tile_dark : spec.tile_light;
    }
    const int top = spec.row_top(r);
    for (int y = top; y < top + T; ++y)
      std::copy(line.begin(), line.end(), data.begin() + static_cast<std::ptrdiff_t>(y) * width);
  }
  return GrayImage(width, height, std::move(data));
}

std::string to_string(MortarKind kind) { return kind == MortarKind::Falling ? "falling" : "rising"; }

std::optional<MortarKind> mortar_kind(const CafeWallSpec& spec, const RowPhases& phases, int m) {
  if (m < 0 || m + 1 >= spec.rows) throw RangeError("mortar_kind: mortar index out of range");
  const int T = spec.tile_px;
  const int d = positive_mod(phases[static_cast<std::size_t>(m + 1)] - phases[static_cast<std::size_t>(m)], 2 * T);
  if (d == 0 || d == T) return std::nullopt;
  return d < T ? MortarKind::Rising : MortarKind::Falling;
}

std::optional<MortarKind> mortar_kind(const CafeWallSpec& spec, int m) {
  return mortar_kind(spec, default_row_phases(spec), m);
}

std::string to_string(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::Systematic: return "systematic";
    case SamplingMethod::Random: return "random";
    case SamplingMethod::MortarCentered: return "mortar_centered";
  }
  return "unknown";
}

CropDims crop_dims_for_tiles(const CafeWallSpec& spec, int rows_tiles, int cols_tiles) {
  if (rows_tiles < 1 || cols_tiles < 1) throw ParameterError("crop_dims_for_tiles: tile counts must be >= 1");
  return {cols_tiles * spec.tile_px, spec.rows_height(rows_tiles)};
}

SampleSet mortar_centered_windows(const CafeWallSpec& spec, MortarKind kind, int count, int offset_px) {
  spec.validate();
  if (count < 1) throw ParameterError("mortar_centered_windows: count must be >= 1");
  if (offset_px < 0) throw ParameterError("mortar_centered_windows: offset_px must be >= 0");

  const int T = spec.tile_px;
  const int crop_h = 2 * T + spec.mortar_px;
  const int crop_w = 9 * T / 2;
  if (crop_h > spec.height() || crop_w > spec.width())
    throw RangeError("mortar_centered_windows: (2T+M) x 4.5T crop larger than the pattern");
  if (static_cast<long long>(count - 1) * offset_px + crop_w > spec.width())
    throw RangeError("mortar_centered_windows: count * offset overruns the pattern width");

  std::optional<int> chosen;
  for (int m = 0; m + 1 < spec.rows && !chosen; ++m)
    if (mortar_kind(spec, m) == kind) chosen = m;
  if (!chosen) throw RangeError("mortar_centered_windows: pattern has no " + to_string(kind) + " mortar");

  SampleSet set;
  set.method = SamplingMethod::MortarCentered;
  set.mortar = kind;
  set.mortar_index = chosen;
  set.source_width = spec.width();
  set.source_height = spec.height();
  set.step_px = offset_px;
  const int top = spec.mortar_top(*chosen) - T;
  for (int k = 0; k < count; ++k) set.windows.push_back({k * offset_px, top, crop_w, crop_h});
  return set;
}

SampleSet systematic_windows(ImageDims image, CropDims crop, int count, int step_px, std::uint64_t seed) {
  if (count < 1) throw ParameterError("systematic_windows: count must be >= 1");
  if (step_px < 0) throw ParameterError("systematic_windows: step_px must be >= 0");
  if (crop.width < 1 || crop.height < 1) throw ParameterError("systematic_windows: crop must have positive size");
  const long long travel = static_cast<long long>(count - 1) * step_px;
  const long long max_left = image.width - crop.width - travel;
  if (max_left < 0 || crop.height > image.height)
    throw RangeError("systematic_windows: crop plus horizontal travel overruns the image");

  std::mt19937_64 rng(seed);
  const auto left0 = static_cast<int>(detail::uniform_int(rng, 0, max_left));
  const auto top = static_cast<int>(detail::uniform_int(rng, 0, image.height - crop.height));

  SampleSet set;
  set.method = SamplingMethod::Systematic;
  set.source_width = image.width;
  set.source_height = image.height;
  set.step_px = step_px;
  set.seed = seed;
  for (int k = 0; k < count; ++k) set.windows.push_back({left0 + k * step_px, top, crop.width, crop.height});
  return set;
}

SampleSet random_windows(ImageDims image, CropDims crop, int count, std::uint64_t seed) {
  if (count < 1) throw ParameterError("random_windows: count must be >= 1");
  if (crop.width < 1 || crop.height < 1) throw ParameterError("random_windows: crop must have positive size");
  if (crop.width > image.width || crop.height > image.height)
    throw RangeError("random_windows: crop larger than the image");

  std::mt19937_64 rng(seed);
  SampleSet set;
  set.method = SamplingMethod::Random;
  set.source_width = image.width;
  set.source_height = image.height;
  set.seed = seed;
  for (int k = 0; k < count; ++k) {
    const auto left = static_cast<int>(detail::uniform_int(rng, 0, image.width - crop.width));
    const auto top = static_cast<int>(detail::uniform_int(rng, 0, image.height - crop.height));
    set.windows.push_back({left, top, crop.width, crop.height});
  }
  return set;
}

}  // namespace cafewall
