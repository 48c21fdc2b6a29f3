#include "cafewall/dog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "cafewall/parallel.hpp"

namespace cafewall {

namespace {

/// Source index for a tap at `i` on a line of length `n` (reflect: edge pixel repeated).
/// Returns -1 for zero padding outside the line.
inline int border_index(int i, int n, BorderPolicy border) noexcept {
  if (i >= 0 && i < n) return i;
  if (border == BorderPolicy::Zero) return -1;
  return i < 0 ? -i - 1 : 2 * n - 1 - i;
}

void check_kernel_fits(const GrayImage& image, int radius, BorderPolicy border) {
  if (border == BorderPolicy::Reflect && (radius > image.width() || radius > image.height())) {
    throw RangeError("convolve: kernel radius " + std::to_string(radius) + " exceeds image " +
                     std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                     " under reflective padding");
  }
}

/// Horizontal pass with symmetric taps (taps[r + k] == taps[r - k]).
Raster<double> row_pass(const Raster<double>& in, const std::vector<double>& taps, BorderPolicy border) {
  const int w = in.width();
  const int h = in.height();
  const int r = static_cast<int>(taps.size()) / 2;
  Raster<double> out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t yi) {
    const int y = static_cast<int>(yi);
    std::vector<double> line(static_cast<std::size_t>(w + 2 * r), 0.0);
    auto src = in.row(y);
    for (int i = -r; i < w + r; ++i) {
      const int s = border_index(i, w, border);
      line[static_cast<std::size_t>(i + r)] = s < 0 ? 0.0 : src[static_cast<std::size_t>(s)];
    }
    auto dst = out.row(y);
    const double* c = line.data() + r;
    for (int x = 0; x < w; ++x) {
      double acc = taps[static_cast<std::size_t>(r)] * c[x];
      for (int k = 1; k <= r; ++k) acc += taps[static_cast<std::size_t>(r + k)] * (c[x - k] + c[x + k]);
      dst[static_cast<std::size_t>(x)] = acc;
    }
  });
  return out;
}

/// Vertical pass, accumulated over whole rows.
Raster<double> column_pass(const Raster<double>& in, const std::vector<double>& taps, BorderPolicy border) {
  const int w = in.width();
  const int h = in.height();
  const int r = static_cast<int>(taps.size()) / 2;
  Raster<double> out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t yi) {
    const int y = static_cast<int>(yi);
    auto dst = out.row(y);
    auto centre = in.row(y);
    const double w0 = taps[static_cast<std::size_t>(r)];
    for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(x)] = w0 * centre[static_cast<std::size_t>(x)];
    for (int k = 1; k <= r; ++k) {
      const int up = border_index(y - k, h, border);
      const int down = border_index(y + k, h, border);
      const double wk = taps[static_cast<std::size_t>(r + k)];
      if (up >= 0 && down >= 0) {
        auto a = in.row(up);
        auto b = in.row(down);
        for (int x = 0; x < w; ++x)
          dst[static_cast<std::size_t>(x)] += wk * (a[static_cast<std::size_t>(x)] + b[static_cast<std::size_t>(x)]);
      } else if (up >= 0 || down >= 0) {
        auto a = in.row(up >= 0 ? up : down);
        for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(x)] += wk * a[static_cast<std::size_t>(x)];
      }
    }
  });
  return out;
}

ResponseMap separable_convolve(const GrayImage& image, const Kernel& kernel, BorderPolicy border) {
  ResponseMap total;
  for (const auto& term : kernel.separable) {
    ResponseMap blurred = column_pass(row_pass(image.raster(), term.taps, border), term.taps, border);
    if (total.empty()) {
      total = ResponseMap(blurred.width(), blurred.height());
      auto t = total.data();
      auto b = blurred.data();
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = term.coefficient * b[i];
    } else {
      auto t = total.data();
      auto b = blurred.data();
      for (std::size_t i = 0; i < t.size(); ++i) t[i] += term.coefficient * b[i];
    }
  }
  return total;
}

void check_side(int side) {
  if (side < 1 || side % 2 == 0) throw ParameterError("kernel side must be a positive odd number, got " + std::to_string(side));
}

}  // namespace

void DoGParams::validate() const {
  if (!(sigma_c > 0.0)) throw ParameterError("DoGParams: sigma_c must be > 0");
  if (!(surround_ratio > 1.0)) throw ParameterError("DoGParams: surround ratio s must be > 1");
  if (!(window_ratio >= 2.0)) throw ParameterError("DoGParams: window ratio h must be >= 2");
}

int DoGParams::window_side() const {
  validate();
  auto span = static_cast<long long>(std::ceil(window_ratio * sigma_c - 1e-9));
  if (span % 2 != 0) ++span;
  return static_cast<int>(span + 1);
}

double Kernel::sum() const noexcept { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::vector<double> gaussian_taps(double sigma, int side) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian: sigma must be > 0");
  check_side(side);
  const int r = side / 2;
  std::vector<double> taps(static_cast<std::size_t>(side));
  for (int i = 0; i < side; ++i) {
    const double d = i - r;
    taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  // Pairwise symmetric sum keeps taps[r-k] and taps[r+k] bit-identical after division.
  double total = taps[static_cast<std::size_t>(r)];
  for (int k = 1; k <= r; ++k) total += 2.0 * taps[static_cast<std::size_t>(r + k)];
  for (auto& t : taps) t /= total;
  return taps;
}

Kernel gaussian_kernel(double sigma, int side) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_kernel: sigma must be > 0");
  check_side(side);
  const int r = side / 2;
  Kernel k;
  k.side = side;
  k.weights.resize(static_cast<std::size_t>(side) * side);
  double total = 0.0;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double dx = x - r;
      const double dy = y - r;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k.weights[static_cast<std::size_t>(y) * side + x] = v;
      total += v;
    }
  }
  for (auto& v : k.weights) v /= total;
  k.separable.push_back({1.0, gaussian_taps(sigma, side)});
  return k;
}

Kernel dog_kernel(const DoGParams& params) {
  params.validate();
  const int side = params.window_side();
  Kernel centre = gaussian_kernel(params.sigma_c, side);
  Kernel surround = gaussian_kernel(params.sigma_surround(), side);
  Kernel k;
  k.side = side;
  k.weights.resize(centre.weights.size());
  for (std::size_t i = 0; i < k.weights.size(); ++i) k.weights[i] = centre.weights[i] - surround.weights[i];
  k.separable.push_back({1.0, std::move(centre.separable.front().taps)});
  k.separable.push_back({-1.0, std::move(surround.separable.front().taps)});
  return k;
}

ResponseMap convolve(const GrayImage& image, const Kernel& kernel, BorderPolicy border) {
  check_side(kernel.side);
  check_kernel_fits(image, kernel.radius(), border);
  if (kernel.separable.empty()) return convolve_direct(image, kernel, border);
  return separable_convolve(image, kernel, border);
}

ResponseMap convolve_direct(const GrayImage& image, const Kernel& kernel, BorderPolicy border) {
  check_side(kernel.side);
  check_kernel_fits(image, kernel.radius(), border);
  const int w = image.width();
  const int h = image.height();
  const int r = kernel.radius();
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;

  std::vector<double> padded(static_cast<std::size_t>(pw) * ph, 0.0);
  for (int y = -r; y < h + r; ++y) {
    const int sy = border_index(y, h, border);
    if (sy < 0) continue;
    for (int x = -r; x < w + r; ++x) {
      const int sx = border_index(x, w, border);
      if (sx < 0) continue;
      padded[static_cast<std::size_t>(y + r) * pw + (x + r)] = image(sx, sy);
    }
  }

  ResponseMap out(w, h);
  const int side = kernel.side;
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int v = 0; v < side; ++v) {
        // True convolution: kernel index (u, v) pairs with offset (r - u, r - v).
        const double* src = padded.data() + static_cast<std::size_t>(y + 2 * r - v) * pw + (x + 2 * r);
        const double* kw = kernel.weights.data() + static_cast<std::size_t>(v) * side;
        for (int u = 0; u < side; ++u) acc += kw[u] * src[-u];
      }
      out(x, y) = acc;
    }
  });
  return out;
}

ResponseMap dog_response(const GrayImage& image, const DoGParams& params, BorderPolicy border) {
  return convolve(image, dog_kernel(params), border);
}

EdgeMap binarize(const ResponseMap& response, double noise_floor) {
  if (!(noise_floor >= 0.0)) throw ParameterError("binarize: noise_floor must be >= 0");
  EdgeMap out(response.width(), response.height());
  auto src = response.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > noise_floor ? 1 : 0;
  return out;
}

EdgeMapStack edge_map_stack(const GrayImage& image, const std::vector<double>& scales, double surround_ratio,
                            double window_ratio, BorderPolicy border, double noise_floor) {
  if (scales.empty()) throw ParameterError("edge_map_stack: at least one scale required");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] > scales[i - 1])) throw ParameterError("edge_map_stack: scales must be strictly increasing");
  for (double s : scales) DoGParams{s, surround_ratio, window_ratio}.validate();

  EdgeMapStack stack;
  stack.layers.resize(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    auto& layer = stack.layers[i];
    layer.sigma_c = scales[i];
    layer.response = dog_response(image, {scales[i], surround_ratio, window_ratio}, border);
    layer.edges = binarize(layer.response, noise_floor);
  });
  return stack;
}

Rgb jetwhite(double t) noexcept {
  struct Stop {
    double t;
    double r, g, b;
  };
  // Positive half; the negative half swaps red and blue.
  static constexpr std::array<Stop, 4> stops{{
      {0.0, 1.0, 1.0, 1.0},
      {0.35, 1.0, 1.0, 0.0},
      {0.7, 1.0, 0.0, 0.0},
      {1.0, 0.5, 0.0, 0.0},
  }};
  const double a = std::clamp(std::abs(t), 0.0, 1.0);
  std::size_t i = 1;
  while (i + 1 < stops.size() && a > stops[i].t) ++i;
  const Stop& lo = stops[i - 1];
  const Stop& hi = stops[i];
  const double f = (a - lo.t) / (hi.t - lo.t);
  auto to8 = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  const std::uint8_t r = to8(lo.r + f * (hi.r - lo.r));
  const std::uint8_t g = to8(lo.g + f * (hi.g - lo.g));
  const std::uint8_t b = to8(lo.b + f * (hi.b - lo.b));
  return t < 0.0 ? Rgb{b, g, r} : Rgb{r, g, b};
}

RgbImage render_jetwhite(const ResponseMap& response) {
  double peak = 0.0;
  for (double v : response.data()) peak = std::max(peak, std::abs(v));
  RgbImage out(response.width(), response.height(), Rgb{255, 255, 255});
  if (peak == 0.0) return out;
  auto src = response.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = jetwhite(src[i] / peak);
  return out;
}

}  // namespace cafewall
