#include <gtest/gtest.h>

#include <algorithm>

#include <cmath>
#include <random>

#include "cafewall/dog.hpp"
#include "cafewall/parallel.hpp"
#include "cafewall/stimulus.hpp"

using namespace cafewall;

namespace {

GrayImage random_image(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (double& x : v) x = u(rng);
  return GrayImage(w, h, std::move(v));
}

double max_abs_diff(const ResponseMap& a, const ResponseMap& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

/// Normalized 1-D Gaussian evaluated directly.
std::vector<double> oracle_taps(double sigma, int side) {
  std::vector<double> t(static_cast<std::size_t>(side));
  double sum = 0.0;
  for (int i = 0; i < side; ++i) {
    const double x = i - side / 2;
    t[static_cast<std::size_t>(i)] = std::exp(-x * x / (2 * sigma * sigma));
    sum += t[static_cast<std::size_t>(i)];
  }
  for (double& v : t) v /= sum;
  return t;
}

}  // namespace

TEST(GaussianKernel, UnitSumAndPeak) {
  Kernel k = gaussian_kernel(4.0, 33);
  EXPECT_EQ(k.side, 33);
  EXPECT_NEAR(k.sum(), 1.0, 1e-9);
  const double c = k.at(16, 16);
  for (int y = 0; y < 33; ++y)
    for (int x = 0; x < 33; ++x)
      if (x != 16 || y != 16) {
        EXPECT_LT(k.at(x, y), c);
      }
}

TEST(GaussianKernel, HandEvaluated3x3) {
  Kernel k = gaussian_kernel(1.0, 3);
  const double e1 = std::exp(-0.5), e2 = std::exp(-1.0);
  const double z = 1.0 + 4 * e1 + 4 * e2;
  const double expected[3][3] = {{e2 / z, e1 / z, e2 / z}, {e1 / z, 1 / z, e1 / z}, {e2 / z, e1 / z, e2 / z}};
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) EXPECT_NEAR(k.at(x, y), expected[y][x], 1e-15);
}

TEST(GaussianKernel, EvenSideRejected) {
  EXPECT_THROW(gaussian_kernel(2.0, 4), ParameterError);
  EXPECT_THROW(gaussian_kernel(0.0, 5), ParameterError);
}

TEST(GaussianKernel, RadialSymmetry) {
  Kernel k = gaussian_kernel(2.3, 15);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 15; ++x) {
      EXPECT_EQ(k.at(x, y), k.at(y, x));
      EXPECT_EQ(k.at(x, y), k.at(14 - x, y));
      EXPECT_EQ(k.at(x, y), k.at(x, 14 - y));
    }
}

TEST(DoGParams, WindowSide) {
  EXPECT_EQ((DoGParams{8, 2, 8}.window_side()), 65);
  EXPECT_EQ((DoGParams{4, 2, 8}.window_side()), 33);
  EXPECT_EQ((DoGParams{28, 2, 8}.window_side()), 225);
  EXPECT_EQ((DoGParams{3, 2, 3}.window_side()), 11);   // h*sigma = 9 is odd: rounded up
  EXPECT_EQ((DoGParams{2.5, 2, 3}.window_side()), 9);  // ceil(7.5) = 8
  EXPECT_THROW((DoGParams{0, 2, 8}.validate()), ParameterError);
  EXPECT_THROW((DoGParams{4, 1.0, 8}.validate()), ParameterError);
  EXPECT_THROW((DoGParams{4, 2, 1.5}.validate()), ParameterError);
}

TEST(DoGKernel, ZeroSumPositiveCentre) {
  Kernel k = dog_kernel({8, 2, 8});
  EXPECT_EQ(k.side, 65);
  EXPECT_NEAR(k.sum(), 0.0, 1e-6);
  EXPECT_GT(k.at(32, 32), 0.0);
}

TEST(DoGKernel, ScaleGridZeroSum) {
  for (double sc : {4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0})
    for (double s : {1.4, 2.0, 4.0, 8.0})
      for (double h : {4.0, 8.0}) {
        Kernel k = dog_kernel({sc, s, h});
        EXPECT_LE(std::abs(k.sum()), 1e-6) << sc << " " << s << " " << h;
      }
}

TEST(DoGKernel, IdenticalGaussiansCancel) {
  Kernel k = dog_kernel({4, 1.0 + 1e-9, 8});
  double m = 0.0;
  for (double w : k.weights) m = std::max(m, std::abs(w));
  EXPECT_LT(m, 1e-8);
}

TEST(DoGKernel, CentreDiscNegativeAnnulus) {
  Kernel k = dog_kernel({4, 2, 8});
  const int c = k.radius();
  // Along each axis the sign flips exactly once going outward.
  int flips = 0;
  for (int x = c + 1; x < k.side; ++x)
    if ((k.at(x, c) > 0) != (k.at(x - 1, c) > 0)) ++flips;
  EXPECT_EQ(flips, 1);
  EXPECT_GT(k.at(c, c), 0.0);
  EXPECT_LT(k.at(c + 10, c), 0.0);
  for (int y = 0; y < k.side; ++y)
    for (int x = 0; x < k.side; ++x) {
      EXPECT_EQ(k.at(x, y), k.at(y, x));
      EXPECT_EQ(k.at(x, y), k.at(k.side - 1 - x, y));
    }
}

TEST(Convolve, ConstantImageAnnihilated) {
  GrayImage img(90, 70, 0.5);
  for (double sc : {4.0, 8.0}) {
    const ResponseMap r = convolve(img, dog_kernel({sc, 2, 8}), BorderPolicy::Reflect);
    for (double v : r.data()) EXPECT_LE(std::abs(v), 1e-6);
    // Zero padding: only the interior is annihilated.
    const Kernel k = dog_kernel({sc, 2, 8});
    const ResponseMap z = convolve(img, k, BorderPolicy::Zero);
    const int rad = k.radius();
    for (int y = rad; y < img.height() - rad; ++y)
      for (int x = rad; x < img.width() - rad; ++x) EXPECT_LE(std::abs(z(x, y)), 1e-6);
  }
}

TEST(Convolve, Linearity) {
  const GrayImage img = random_image(40, 30, 3);
  std::vector<double> scaled(img.data().begin(), img.data().end());
  for (double& v : scaled) v *= 0.25;
  const Kernel k = dog_kernel({2, 2, 8});
  const ResponseMap a = convolve(img, k);
  const ResponseMap b = convolve(GrayImage(40, 30, scaled), k);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b.data()[i], 0.25 * a.data()[i], 1e-12);
}

TEST(Convolve, StepEdgeMatchesOneDimensionalOracle) {
  // Dark left half, bright right half, constant down each column.
  const int w = 80, h = 40, step = 40;
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) v[static_cast<std::size_t>(y) * w + x] = x < step ? 0.0 : 1.0;
  const GrayImage img(w, h, v);
  const DoGParams p{3, 2, 8};
  const int side = p.window_side();
  const auto g1 = oracle_taps(p.sigma_c, side);
  const auto g2 = oracle_taps(p.sigma_surround(), side);
  const int r = side / 2;

  // Brute-force 1-D convolution with edge-repeating reflection.
  std::vector<double> expected(static_cast<std::size_t>(w));
  for (int x = 0; x < w; ++x) {
    double acc = 0.0;
    for (int k = -r; k <= r; ++k) {
      int i = x + k;
      if (i < 0) i = -i - 1;
      if (i >= w) i = 2 * w - 1 - i;
      acc += (g1[static_cast<std::size_t>(k + r)] - g2[static_cast<std::size_t>(k + r)]) * (i < step ? 0.0 : 1.0);
    }
    expected[static_cast<std::size_t>(x)] = acc;
  }
  const ResponseMap resp = dog_response(img, p);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) EXPECT_NEAR(resp(x, y), expected[static_cast<std::size_t>(x)], 1e-12);

  // Positive lobe on the bright side, negative on the dark side. The extrema sit
  // one zero-crossing radius z of the kernel from the step: R(step + j) grows
  // while the kernel tap d(j) is positive.
  int z = 1;
  while (g1[static_cast<std::size_t>(r + z)] - g2[static_cast<std::size_t>(r + z)] > 0) ++z;
  const auto row = resp.row(h / 2);
  const auto mx = std::max_element(row.begin(), row.end()) - row.begin();
  const auto mn = std::min_element(row.begin(), row.end()) - row.begin();
  EXPECT_EQ(mx, step + z - 1);
  EXPECT_EQ(mn, step - z);
  for (int x = step - 8; x < step; ++x) EXPECT_LT(row[static_cast<std::size_t>(x)], 0.0);
  for (int x = step; x < step + 8; ++x) EXPECT_GT(row[static_cast<std::size_t>(x)], 0.0);
}

TEST(Convolve, SeparableMatchesDirect) {
  const GrayImage img = random_image(64, 64, 11);
  for (double sc : {1.0, 2.0, 3.5, 6.0})
    for (double s : {1.4, 2.0, 3.0})
      for (double h : {4.0, 8.0})
        for (auto border : {BorderPolicy::Reflect, BorderPolicy::Zero}) {
          const Kernel k = dog_kernel({sc, s, h});
          EXPECT_LE(max_abs_diff(convolve(img, k, border), convolve_direct(img, k, border)), 1e-6)
              << sc << " " << s << " " << h;
        }
}

TEST(Convolve, FlipEquivariantExactly) {
  const GrayImage img = random_image(57, 33, 5);
  for (auto border : {BorderPolicy::Reflect, BorderPolicy::Zero}) {
    const Kernel k = dog_kernel({3, 2, 8});
    EXPECT_EQ(convolve(img.mirrored(), k, border), convolve(img, k, border).mirrored());
    EXPECT_EQ(binarize(convolve(img.mirrored(), k, border)), binarize(convolve(img, k, border)).mirrored());
  }
}

TEST(Convolve, ReflectNeedsKernelToFit) {
  const GrayImage img(10, 40, 0.5);
  const Kernel k = dog_kernel({2, 2, 8});  // radius 8
  EXPECT_NO_THROW(convolve(img, k, BorderPolicy::Reflect));
  const Kernel big = dog_kernel({4, 2, 8});  // radius 16 > 10
  EXPECT_THROW(convolve(img, big, BorderPolicy::Reflect), RangeError);
  EXPECT_NO_THROW(convolve(img, big, BorderPolicy::Zero));
}

TEST(Binarize, ThresholdRules) {
  auto all_equal = [](const EdgeMap& e, std::uint8_t v) {
    return std::all_of(e.data().begin(), e.data().end(), [v](std::uint8_t x) { return x == v; });
  };
  EXPECT_TRUE(all_equal(binarize(ResponseMap(4, 3, -0.2)), 0));
  EXPECT_TRUE(all_equal(binarize(ResponseMap(4, 3, 1e-6)), 1));
  const ResponseMap zero(4, 3, 0.0);
  EXPECT_TRUE(all_equal(binarize(zero), 0));
  const ResponseMap residue(4, 3, 1e-16);
  EXPECT_TRUE(all_equal(binarize(residue), 0));
  EXPECT_TRUE(all_equal(binarize(residue, 0.0), 1));
  EXPECT_THROW(binarize(zero, -1.0), ParameterError);
}

TEST(EdgeMapStack, LayersPerScale) {
  const GrayImage wall = generate_cafe_wall(CafeWallSpec::make(3, 8, 200, 8));
  const EdgeMapStack stack = edge_map_stack(wall, {4, 8, 12, 16, 20, 24}, 2, 8);
  ASSERT_EQ(stack.layers.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(stack.layers[i].sigma_c, 4.0 * (i + 1));
    EXPECT_EQ(stack.layers[i].response.width(), wall.width());
    EXPECT_EQ(stack.layers[i].edges.height(), wall.height());
    EXPECT_GT(count_edges(stack.layers[i].edges), 0u);
  }
  EXPECT_EQ(edge_map_stack(wall, {8}, 2, 8).layers.size(), 1u);
  EXPECT_THROW(edge_map_stack(wall, {8, 8}, 2, 8), ParameterError);
  EXPECT_THROW(edge_map_stack(wall, {8, 4}, 2, 8), ParameterError);
}

TEST(EdgeMapStack, IndependentOfThreadCount) {
  const GrayImage img = random_image(120, 90, 8);
  set_thread_count(1);
  const EdgeMapStack a = edge_map_stack(img, {2, 4, 6}, 2, 8);
  set_thread_count(4);
  const EdgeMapStack b = edge_map_stack(img, {2, 4, 6}, 2, 8);
  set_thread_count(0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.layers[i].response, b.layers[i].response);
    EXPECT_EQ(a.layers[i].edges, b.layers[i].edges);
  }
}

TEST(Jetwhite, ZeroIsWhiteAndNegationSwapsColours) {
  const RgbImage white = render_jetwhite(ResponseMap(5, 4, 0.0));
  for (const Rgb& p : white.data()) EXPECT_EQ(p, (Rgb{255, 255, 255}));

  const GrayImage img = random_image(30, 20, 2);
  const ResponseMap r = dog_response(img, {2, 2, 8});
  ResponseMap neg = r;
  for (double& v : neg.data()) v = -v;
  const RgbImage a = render_jetwhite(r), b = render_jetwhite(neg);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(b.data()[i], (Rgb{a.data()[i].b, a.data()[i].g, a.data()[i].r}));

  const Rgb warm = jetwhite(0.8), cool = jetwhite(-0.8);
  EXPECT_GT(warm.r, warm.b);
  EXPECT_GT(cool.b, cool.r);
}
