#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cafewall/hough.hpp"

namespace cafewall {

/// Reference orientations; each owns the half-open deviation interval [-22.5, 22.5).
enum class OrientationClass { H = 0, V = 1, D1 = 2, D2 = 3 };

inline constexpr std::array<OrientationClass, 4> kAllClasses{OrientationClass::H, OrientationClass::V,
                                                             OrientationClass::D1, OrientationClass::D2};

std::string to_string(OrientationClass c);
std::optional<OrientationClass> orientation_class_from_string(const std::string& name);

/// Angle in [-90, 90) degrees, counter-clockwise from +x in a y-up frame. Positive
/// values rise to the right. Throws ParameterError for coincident endpoints.
double segment_angle(const LineSegment& seg);
double segment_angle(PixelPoint p1, PixelPoint p2);

struct Classification {
  OrientationClass cls = OrientationClass::H;
  double deviation_deg = 0.0;  ///< signed, in [-22.5, 22.5)
};

/// Nearest reference orientation (V covers both ends of the range) and the signed
/// deviation from it.
Classification classify(double angle_deg);

struct TiltRecord {
  double scale = 0.0;
  OrientationClass cls = OrientationClass::H;
  double deviation_deg = 0.0;
  double length = 0.0;
  int sample_id = 0;
};

/// Records for a list of segments.
std::vector<TiltRecord> tilt_records(const std::vector<LineSegment>& segments, int sample_id);

struct TiltCell {
  std::size_t n = 0;
  double mean_abs_dev = 0.0;
  double std_err = 0.0;          ///< sample std / sqrt(n); 0 when n == 1
  double mean_signed_dev = 0.0;  ///< kept for falling/rising direction checks
  [[nodiscard]] bool absent() const noexcept { return n == 0; }
};

/// Per (scale, class) statistics of |deviation|, every line weighted equally.
struct TiltStats {
  std::vector<double> scales;                  ///< ascending
  std::vector<std::array<TiltCell, 4>> cells;  ///< parallel to scales, indexed by class

  [[nodiscard]] const TiltCell& cell(double scale, OrientationClass c) const;
  [[nodiscard]] std::optional<std::size_t> scale_index(double scale) const noexcept;
};

/// Aggregate over the scales present in `records`.
TiltStats aggregate(const std::vector<TiltRecord>& records);
/// Aggregate on a fixed scale grid; scales without records are reported absent.
TiltStats aggregate(const std::vector<TiltRecord>& records, const std::vector<double>& scale_grid);

struct DeviationHistogram {
  OrientationClass cls = OrientationClass::H;
  bool merged_diagonals = false;   ///< D1 and D2 pooled
  double bin_width = 1.0;
  std::vector<double> bin_lower;   ///< lower edge of each bin, bins are [lo, lo + width)
  std::vector<double> scales;
  std::vector<std::vector<double>> counts;  ///< [scale][bin]
  bool normalized = false;
};

/// Counts of signed deviations per scale. Bins sit on multiples of bin_width and
/// cover [-22.5, 22.5). When `scale_grid` is empty the scales present are used.
DeviationHistogram histogram(const std::vector<TiltRecord>& records, OrientationClass cls, double bin_width = 1.0,
                             bool normalized = false, const std::vector<double>& scale_grid = {});

/// Same, pooling D1 and D2.
DeviationHistogram diagonal_histogram(const std::vector<TiltRecord>& records, double bin_width = 1.0,
                                      bool normalized = false, const std::vector<double>& scale_grid = {});

struct ComparisonRow {
  std::string foveal_label;
  double scale = 0.0;
  OrientationClass cls = OrientationClass::H;
  TiltCell foveal;
  TiltCell global;
  std::optional<double> delta;  ///< foveal - global mean; absent if either cell is
};

struct NamedTiltStats {
  std::string label;
  TiltStats stats;
};

/// Side-by-side foveal vs global means. Throws ParameterError when scale grids differ.
std::vector<ComparisonRow> compare_local_global(const std::vector<NamedTiltStats>& foveal, const TiltStats& global);

// ---------------------------------------------------------------------------
// Text forms

/// "07.15±0.54"; n == 1 cells print "±0.0"; absent cells print "NaN".
std::string format_cell(const TiltCell& cell);

/// Table CSV: sigma_c,H,V,D1,D2,n_H,n_V,n_D1,n_D2
std::string tilt_stats_csv(const TiltStats& stats);
/// Parses tilt_stats_csv output. Means and standard errors are recovered at the
/// printed precision.
TiltStats parse_tilt_stats_csv(const std::string& text);

/// One row per bin: bin_lower,<scale columns...>
std::string histogram_csv(const DeviationHistogram& hist);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace cafewall
