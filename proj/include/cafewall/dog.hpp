#pragma once

#include <optional>
#include <vector>

#include "cafewall/image.hpp"

namespace cafewall {

/// Centre-surround filter parameters: centre scale sigma_c (px), surround ratio
/// s = sigma_surround / sigma_c, and window ratio h (kernel side = h * sigma_c + 1).
struct DoGParams {
  double sigma_c = 8.0;
  double surround_ratio = 2.0;
  double window_ratio = 8.0;

  void validate() const;
  /// h * sigma_c + 1, rounded up so the side is odd.
  [[nodiscard]] int window_side() const;
  [[nodiscard]] double sigma_surround() const noexcept { return surround_ratio * sigma_c; }
};

/// Odd-sided square kernel. Kernels built from Gaussians keep their separable
/// form, sum_i coeff_i * (taps_i outer taps_i), so convolve() can run them in 1-D passes.
struct Kernel {
  struct SeparableTerm {
    double coefficient = 1.0;
    std::vector<double> taps;
  };

  int side = 0;
  std::vector<double> weights;  ///< side * side, row-major
  std::vector<SeparableTerm> separable;

  [[nodiscard]] int radius() const noexcept { return side / 2; }
  [[nodiscard]] double at(int x, int y) const noexcept {
    return weights[static_cast<std::size_t>(y) * side + x];
  }
  [[nodiscard]] double sum() const noexcept;
};

enum class BorderPolicy { Reflect, Zero };

/// Normalized 1-D Gaussian sampled on the integer grid centred on the middle tap.
std::vector<double> gaussian_taps(double sigma, int side);

/// Isotropic Gaussian sampled on the side x side grid, renormalized to unit sum.
Kernel gaussian_kernel(double sigma, int side);

/// gaussian(sigma_c) - gaussian(s * sigma_c), both normalized over the same window.
Kernel dog_kernel(const DoGParams& params);

/// Same-size filtering. Kernels carrying a separable form are evaluated as a
/// sum of row/column passes; others fall back to direct 2-D convolution.
/// Reflect mirrors about the border (edge pixel repeated) and requires the kernel
/// radius to be smaller than both image dimensions; Zero pads with zeros.
ResponseMap convolve(const GrayImage& image, const Kernel& kernel, BorderPolicy border = BorderPolicy::Reflect);

/// Direct O(side^2) convolution regardless of separable form.
ResponseMap convolve_direct(const GrayImage& image, const Kernel& kernel, BorderPolicy border = BorderPolicy::Reflect);

/// DoG response of `image`.
ResponseMap dog_response(const GrayImage& image, const DoGParams& params, BorderPolicy border = BorderPolicy::Reflect);

/// Responses with magnitude at or below this are rounding residue of a zero-sum
/// kernel over a locally constant region and binarize to 0.
inline constexpr double kDefaultNoiseFloor = 1e-10;

/// 1 where response > noise_floor, else 0.
EdgeMap binarize(const ResponseMap& response, double noise_floor = kDefaultNoiseFloor);

struct EdgeMapLayer {
  double sigma_c = 0.0;
  ResponseMap response;
  EdgeMap edges;
};

struct EdgeMapStack {
  std::vector<EdgeMapLayer> layers;  ///< ordered by strictly increasing sigma_c
};

/// One (response, binary map) layer per scale. Scales must be strictly increasing.
EdgeMapStack edge_map_stack(const GrayImage& image, const std::vector<double>& scales, double surround_ratio,
                            double window_ratio, BorderPolicy border = BorderPolicy::Reflect,
                            double noise_floor = kDefaultNoiseFloor);

/// Diverging colormap with white at zero, warm hues for positive and cool hues
/// for negative responses, scaled symmetrically by the largest magnitude.
RgbImage render_jetwhite(const ResponseMap& response);

/// Colour of a normalized value t in [-1, 1].
Rgb jetwhite(double t) noexcept;

}  // namespace cafewall
