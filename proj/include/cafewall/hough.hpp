#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cafewall/image.hpp"

namespace cafewall {

/// Suppression window in accumulator cells; both sides odd.
struct NHood {
  int rho = 1;
  int theta = 1;
  friend bool operator==(const NHood&, const NHood&) = default;
};

struct HoughParams {
  double theta_step = 1.0;  ///< degrees
  double rho_step = 1.0;    ///< pixels
  int num_peaks = 100;
  int threshold = 3;              ///< minimum raw vote count for a peak
  std::optional<NHood> nhood;     ///< nullopt: derived from accumulator size
  double fill_gap = 40.0;         ///< px
  double min_length = 450.0;      ///< px

  void validate() const;
};

/// Quantized (theta, rho) axes for an image.
///
/// theta_i = i * theta_step covers [0, 180). rho = (x - x_origin) cos(theta) +
/// y sin(theta), with x_origin = (width - 1) / 2 so that a left-right mirror of the
/// image maps bin (rho, theta) onto (rho, 180 - theta) exactly. The rho axis is
/// symmetric, rho_j = (j - rho_half) * rho_step, and spans at least [-D, D] for the
/// image diagonal D. A pixel votes for bin round(rho / rho_step) + rho_half, with
/// halves rounded away from zero.
struct HoughAxes {
  int width = 0;
  int height = 0;
  double theta_step = 1.0;
  double rho_step = 1.0;
  double x_origin = 0.0;
  int rho_half = 0;
  std::vector<double> theta_deg;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;

  static HoughAxes make(int width, int height, double theta_step, double rho_step);

  [[nodiscard]] int theta_count() const noexcept { return static_cast<int>(theta_deg.size()); }
  [[nodiscard]] int rho_count() const noexcept { return 2 * rho_half + 1; }
  [[nodiscard]] double rho_value(int rho_index) const noexcept { return (rho_index - rho_half) * rho_step; }
  /// True when theta + 180 wraps back onto the axis (theta_count * step == 180).
  [[nodiscard]] bool wraps() const noexcept;

  [[nodiscard]] double rho(int x, int y, int theta_index) const noexcept {
    return (x - x_origin) * cos_theta[static_cast<std::size_t>(theta_index)] +
           y * sin_theta[static_cast<std::size_t>(theta_index)];
  }
  [[nodiscard]] int rho_bin(double rho) const noexcept;
};

class HoughAccumulator {
 public:
  HoughAccumulator() = default;
  explicit HoughAccumulator(HoughAxes axes);

  [[nodiscard]] const HoughAxes& axes() const noexcept { return axes_; }
  [[nodiscard]] int theta_count() const noexcept { return axes_.theta_count(); }
  [[nodiscard]] int rho_count() const noexcept { return axes_.rho_count(); }

  [[nodiscard]] std::uint32_t votes(int rho_index, int theta_index) const noexcept {
    return bins_[index(rho_index, theta_index)];
  }
  std::uint32_t& votes(int rho_index, int theta_index) noexcept { return bins_[index(rho_index, theta_index)]; }

  /// Theta-major storage: all rho bins of theta 0, then theta 1, ...
  [[nodiscard]] const std::vector<std::uint32_t>& bins() const noexcept { return bins_; }
  std::vector<std::uint32_t>& bins() noexcept { return bins_; }

  [[nodiscard]] std::uint64_t total_votes() const noexcept;

  friend bool operator==(const HoughAccumulator& a, const HoughAccumulator& b) { return a.bins_ == b.bins_; }

 private:
  [[nodiscard]] std::size_t index(int rho_index, int theta_index) const noexcept {
    return static_cast<std::size_t>(theta_index) * static_cast<std::size_t>(rho_count()) +
           static_cast<std::size_t>(rho_index);
  }

  HoughAxes axes_;
  std::vector<std::uint32_t> bins_;
};

struct Peak {
  int theta_index = 0;
  int rho_index = 0;
  std::uint32_t votes = 0;
  friend bool operator==(const Peak&, const Peak&) = default;
};

struct PixelPoint {
  int x = 0;  ///< column
  int y = 0;  ///< row
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct LineSegment {
  PixelPoint p1;
  PixelPoint p2;
  int theta_index = 0;
  int rho_index = 0;
  double theta_deg = 0.0;
  double rho = 0.0;
  double length = 0.0;
  double scale = 0.0;  ///< sigma_c of the source edge map
  friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Every edge pixel votes once per theta.
HoughAccumulator hough_transform(const EdgeMap& edges, double theta_step = 1.0, double rho_step = 1.0);

/// Odd sizes 2 * ceil(n / 100) + 1 for n rho and theta bins, i.e. about 1/50 of each axis.
NHood default_nhood(const HoughAccumulator& acc) noexcept;

/// Iterative maximum search with neighbourhood suppression. Each round takes the
/// largest remaining bin; it is kept if it has at least `threshold` votes, and the
/// nhood rectangle around it is zeroed (wrapping across theta = 0/180 with rho
/// negated). Equal votes prefer theta nearest 90 degrees, then rho nearest 0, then
/// the smaller rho index, then the smaller theta index: this order commutes with
/// the left-right mirror, keeping mirrored inputs' peak lists mirrored.
std::vector<Peak> hough_peaks(const HoughAccumulator& acc, int num_peaks, int threshold,
                              std::optional<NHood> nhood = std::nullopt);

/// Segments along each peak's bin. Pixels in the bin are ordered by their
/// position along the line, split where consecutive pixels are more than
/// fill_gap apart (measured along the line), and kept when the endpoint distance
/// is at least min_length. Output follows peak order.
std::vector<LineSegment> hough_lines(const EdgeMap& edges, const HoughAccumulator& acc, const std::vector<Peak>& peaks,
                                     double fill_gap, double min_length, double scale = 0.0);

/// transform + peaks + lines with one parameter set.
std::vector<LineSegment> detect_lines(const EdgeMap& edges, const HoughParams& params, double scale = 0.0);

}  // namespace cafewall
