#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cafewall/hough.hpp"
#include "cafewall/parallel.hpp"

using namespace cafewall;

namespace {

EdgeMap random_edges(int w, int h, double density, std::mt19937& rng) {
  std::bernoulli_distribution on(density);
  EdgeMap e(w, h);
  for (auto& v : e.data()) v = on(rng) ? 1 : 0;
  return e;
}

/// Brute-force accumulator: pixels outer, angles inner, tables rebuilt from scratch.
std::vector<std::uint32_t> brute_force(const EdgeMap& e, double theta_step, double rho_step, int& nrho) {
  const int n = static_cast<int>(std::ceil(180.0 / theta_step - 1e-9));
  const bool wraps = std::abs(n * theta_step - 180.0) < 1e-9;
  std::vector<double> c(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (i == 0) {
      c[k] = 1.0, s[k] = 0.0;
    } else if (wraps && 2 * i == n) {
      c[k] = 0.0, s[k] = 1.0;
    } else if (wraps && 2 * i > n) {
      c[k] = -c[static_cast<std::size_t>(n - i)], s[k] = s[static_cast<std::size_t>(n - i)];
    } else {
      c[k] = std::cos(i * theta_step * std::numbers::pi / 180.0);
      s[k] = std::sin(i * theta_step * std::numbers::pi / 180.0);
    }
  }
  const int half = static_cast<int>(std::ceil(std::hypot(e.width() - 1.0, e.height() - 1.0) / rho_step));
  nrho = 2 * half + 1;
  const double x0 = (e.width() - 1) / 2.0;
  std::vector<std::uint32_t> bins(static_cast<std::size_t>(n) * nrho, 0);
  for (int y = 0; y < e.height(); ++y)
    for (int x = 0; x < e.width(); ++x) {
      if (!e(x, y)) continue;
      for (int t = 0; t < n; ++t) {
        const double rho = (x - x0) * c[static_cast<std::size_t>(t)] + y * s[static_cast<std::size_t>(t)];
        const long bin = std::lround(rho / rho_step) + half;
        ++bins[static_cast<std::size_t>(t) * nrho + static_cast<std::size_t>(bin)];
      }
    }
  return bins;
}

EdgeMap horizontal_runs(int w, int h, int y, const std::vector<std::pair<int, int>>& runs) {
  EdgeMap e(w, h);
  for (auto [a, b] : runs)
    for (int x = a; x <= b; ++x) e(x, y) = 1;
  return e;
}

void expect_endpoints(const LineSegment& s, PixelPoint a, PixelPoint b) {
  EXPECT_TRUE((s.p1 == a && s.p2 == b) || (s.p1 == b && s.p2 == a))
      << "(" << s.p1.x << "," << s.p1.y << ")-(" << s.p2.x << "," << s.p2.y << ")";
}

HoughParams one_peak(double fill_gap, double min_length) {
  HoughParams p;
  p.num_peaks = 1;
  p.threshold = 3;
  p.fill_gap = fill_gap;
  p.min_length = min_length;
  return p;
}

}  // namespace

TEST(HoughTransform, EmptyAndSinglePixel) {
  EdgeMap empty(12, 7);
  const HoughAccumulator a = hough_transform(empty);
  EXPECT_EQ(a.total_votes(), 0u);
  EXPECT_EQ(a.theta_count(), 180);

  EdgeMap one(12, 7);
  one(4, 3) = 1;
  const HoughAccumulator b = hough_transform(one);
  for (int t = 0; t < b.theta_count(); ++t) {
    std::uint32_t col = 0;
    for (int r = 0; r < b.rho_count(); ++r) col += b.votes(r, t);
    EXPECT_EQ(col, 1u);
  }
}

TEST(HoughTransform, AxesCoverDiagonal) {
  const HoughAccumulator a = hough_transform(EdgeMap(30, 40));
  const double d = std::hypot(29.0, 39.0);
  EXPECT_LE(a.axes().rho_value(0), -d);
  EXPECT_GE(a.axes().rho_value(a.rho_count() - 1), d);
  EXPECT_EQ(a.bins().size(), static_cast<std::size_t>(a.theta_count()) * a.rho_count());
  EXPECT_EQ(a.axes().theta_deg.front(), 0.0);
  EXPECT_LT(a.axes().theta_deg.back(), 180.0);
}

TEST(HoughTransform, CollinearRowPixels) {
  EdgeMap e(20, 12);
  for (int x = 3; x < 13; ++x) e(x, 5) = 1;
  const HoughAccumulator a = hough_transform(e);
  EXPECT_EQ(a.total_votes(), 10u * 180u);
  std::uint32_t best = 0;
  for (auto v : a.bins()) best = std::max(best, v);
  EXPECT_EQ(best, 10u);
  EXPECT_EQ(a.axes().theta_deg[90], 90.0);
  EXPECT_EQ(a.votes(a.axes().rho_half + 5, 90), 10u);
  EXPECT_EQ(a.axes().rho_value(a.axes().rho_half + 5), 5.0);
}

TEST(HoughTransform, MatchesBruteForce) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(1, 16);
    const int w = dim(rng), h = dim(rng);
    const double theta_step = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1 ? 0.5 : 7.0);
    const double rho_step = (trial % 2 == 0) ? 1.0 : 0.75;
    const EdgeMap e = random_edges(w, h, 0.3, rng);
    int nrho = 0;
    const auto expected = brute_force(e, theta_step, rho_step, nrho);
    const HoughAccumulator acc = hough_transform(e, theta_step, rho_step);
    ASSERT_EQ(acc.rho_count(), nrho);
    ASSERT_EQ(acc.bins(), expected) << "trial " << trial << " " << w << "x" << h;
  }
}

TEST(HoughTransform, MirrorMapsThetaToSupplement) {
  std::mt19937 rng(7);
  const EdgeMap e = random_edges(37, 21, 0.2, rng);
  const HoughAccumulator a = hough_transform(e), b = hough_transform(e.mirrored());
  const int n = a.theta_count();
  for (int t = 0; t < n; ++t)
    for (int r = 0; r < a.rho_count(); ++r) {
      // Mirror of theta 0 is theta 180, i.e. theta 0 with rho negated.
      const std::uint32_t other = t == 0 ? b.votes(a.rho_count() - 1 - r, 0) : b.votes(r, n - t);
      ASSERT_EQ(a.votes(r, t), other) << t << " " << r;
    }
}

TEST(HoughTransform, IndependentOfThreadCount) {
  std::mt19937 rng(3);
  const EdgeMap e = random_edges(200, 150, 0.05, rng);
  set_thread_count(1);
  const HoughAccumulator a = hough_transform(e);
  set_thread_count(3);
  const HoughAccumulator b = hough_transform(e);
  set_thread_count(0);
  EXPECT_EQ(a, b);
}

TEST(DefaultNHood, OddAndProportional) {
  const HoughAccumulator a = hough_transform(EdgeMap(2800, 1864));
  EXPECT_EQ(a.rho_count(), 6727);
  const NHood n = default_nhood(a);
  EXPECT_EQ(n.rho, 137);
  EXPECT_EQ(n.theta, 5);
  const NHood small = default_nhood(hough_transform(EdgeMap(4, 4)));
  EXPECT_EQ(small.rho, 3);
  EXPECT_EQ(small.theta, 5);
}

namespace {

/// 4 thetas (step 45) by 5 rhos: a 2x2 map has diagonal sqrt(2), so rho_half = 2.
HoughAccumulator toy_accumulator() { return HoughAccumulator(HoughAxes::make(2, 2, 45.0, 1.0)); }

}  // namespace

TEST(HoughPeaks, SingleBin) {
  HoughAccumulator acc = toy_accumulator();
  ASSERT_EQ(acc.theta_count(), 4);
  ASSERT_EQ(acc.rho_count(), 5);
  acc.votes(3, 1) = 7;
  const auto peaks = hough_peaks(acc, 10, 3, NHood{1, 1});
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_EQ(peaks[0], (Peak{1, 3, 7}));
}

TEST(HoughPeaks, BelowThresholdIsEmpty) {
  HoughAccumulator acc = toy_accumulator();
  for (auto& v : acc.bins()) v = 2;
  EXPECT_TRUE(hough_peaks(acc, 10, 3, NHood{1, 1}).empty());
}

TEST(HoughPeaks, EqualMaximaInsideOneNeighbourhood) {
  HoughAccumulator acc = toy_accumulator();
  acc.votes(1, 1) = 9;
  acc.votes(2, 2) = 9;
  const auto peaks = hough_peaks(acc, 10, 3, NHood{3, 3});
  ASSERT_EQ(peaks.size(), 1u);
  // Ties go to theta nearest 90 degrees (index 2 of 4).
  EXPECT_EQ(peaks[0], (Peak{2, 2, 9}));
  // Rho nearest zero breaks ties in the same theta column.
  HoughAccumulator col = toy_accumulator();
  col.votes(0, 2) = 9;
  col.votes(3, 2) = 9;
  const auto p2 = hough_peaks(col, 1, 3, NHood{1, 1});
  ASSERT_EQ(p2.size(), 1u);
  EXPECT_EQ(p2[0], (Peak{2, 3, 9}));
}

TEST(HoughPeaks, SuppressionWrapsAcrossThetaSeam) {
  HoughAccumulator acc = toy_accumulator();
  acc.votes(1, 0) = 9;  // theta 0, rho -1
  acc.votes(3, 3) = 8;  // theta 135, rho +1: neighbour of (theta 180, rho -1)
  acc.votes(0, 3) = 5;  // outside the wrapped window
  const auto peaks = hough_peaks(acc, 10, 3, NHood{1, 3});
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0], (Peak{0, 1, 9}));
  EXPECT_EQ(peaks[1], (Peak{3, 0, 5}));
}

TEST(HoughPeaks, ThresholdAndCountMonotone) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const EdgeMap e = random_edges(40, 30, 0.1, rng);
    const HoughAccumulator acc = hough_transform(e);
    const auto many = hough_peaks(acc, 60, 3);
    for (int n : {1, 5, 20, 59}) {
      const auto few = hough_peaks(acc, n, 3);
      ASSERT_LE(few.size(), many.size());
      EXPECT_TRUE(std::equal(few.begin(), few.end(), many.begin()));
    }
    std::size_t prev = many.size();
    for (int th : {4, 6, 8, 12}) {
      const auto p = hough_peaks(acc, 60, th);
      EXPECT_LE(p.size(), prev);
      for (const auto& pk : p) EXPECT_GE(pk.votes, static_cast<std::uint32_t>(th));
      prev = p.size();
    }
  }
}

TEST(HoughPeaks, RejectsEvenNeighbourhood) {
  EXPECT_THROW(hough_peaks(toy_accumulator(), 1, 1, NHood{2, 1}), ParameterError);
  EXPECT_THROW(hough_peaks(toy_accumulator(), 0, 1), ParameterError);
}

TEST(HoughLines, SingleLongRun) {
  const EdgeMap e = horizontal_runs(600, 20, 10, {{50, 549}});
  const auto segs = detect_lines(e, one_peak(40, 450));
  ASSERT_EQ(segs.size(), 1u);
  expect_endpoints(segs[0], {50, 10}, {549, 10});
  EXPECT_DOUBLE_EQ(segs[0].length, 499.0);
  EXPECT_EQ(segs[0].theta_deg, 90.0);
  EXPECT_EQ(segs[0].rho, 10.0);
}

TEST(HoughLines, ShortRunDiscarded) {
  EXPECT_TRUE(detect_lines(horizontal_runs(600, 20, 10, {{50, 349}}), one_peak(40, 450)).empty());
}

TEST(HoughLines, GapMerging) {
  const EdgeMap e = horizontal_runs(600, 20, 10, {{0, 249}, {280, 529}});
  const auto merged = detect_lines(e, one_peak(40, 450));
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_DOUBLE_EQ(merged[0].length, 529.0);
  // Gap of 31 px between pixels 249 and 280 exceeds fill_gap 30: two pieces.
  const auto split = detect_lines(e, one_peak(30, 200));
  ASSERT_EQ(split.size(), 2u);
  EXPECT_DOUBLE_EQ(split[0].length, 249.0);
  EXPECT_DOUBLE_EQ(split[1].length, 249.0);
  EXPECT_TRUE(detect_lines(e, one_peak(30, 450)).empty());
}

TEST(HoughLines, RunLengthOracleOnDiagonal) {
  // 45-degree staircase: consecutive pixels are sqrt(2) apart along the line.
  EdgeMap e(400, 400);
  for (int k = 20; k < 380; ++k) e(k, k) = 1;
  const auto segs = detect_lines(e, one_peak(2, 100));
  ASSERT_EQ(segs.size(), 1u);
  expect_endpoints(segs[0], {20, 20}, {379, 379});
  EXPECT_NEAR(segs[0].length, 359.0 * std::sqrt(2.0), 1e-9);
  EXPECT_EQ(segs[0].theta_deg, 135.0);
}

TEST(HoughLines, SegmentsAreSound) {
  std::mt19937 rng(5);
  EdgeMap e = random_edges(300, 200, 0.02, rng);
  for (int x = 0; x < 300; ++x) e(x, 100 + x / 30) = 1;
  HoughParams p;
  p.num_peaks = 30;
  p.fill_gap = 20;
  p.min_length = 60;
  const HoughAccumulator acc = hough_transform(e);
  const auto peaks = hough_peaks(acc, p.num_peaks, p.threshold);
  const auto segs = hough_lines(e, acc, peaks, p.fill_gap, p.min_length, 4.0);
  ASSERT_FALSE(segs.empty());
  for (const auto& s : segs) {
    EXPECT_GE(s.length, p.min_length);
    EXPECT_EQ(s.scale, 4.0);
    for (PixelPoint q : {s.p1, s.p2}) {
      EXPECT_TRUE(e(q.x, q.y));
      EXPECT_EQ(acc.axes().rho_bin(acc.axes().rho(q.x, q.y, s.theta_index)), s.rho_index);
    }
  }
  EXPECT_EQ(segs, hough_lines(e, acc, peaks, p.fill_gap, p.min_length, 4.0));
}

TEST(HoughLines, AngleRecovery) {
  for (double alpha : {0.0, 5.0, -5.0, 45.0, -45.0, 90.0}) {
    EdgeMap e(512, 512);
    const double rad = alpha * std::numbers::pi / 180.0;
    if (alpha == 90.0) {
      for (int y = 0; y < 512; ++y) e(256, y) = 1;
    } else if (std::abs(alpha) <= 45.0) {
      for (int x = 0; x < 512; ++x) {
        const int y = static_cast<int>(std::lround(256 - (x - 255.5) * std::tan(rad)));
        if (y >= 0 && y < 512) e(x, y) = 1;
      }
    }
    HoughParams p;
    p.num_peaks = 5;
    p.fill_gap = 20;
    p.min_length = 100;
    const auto segs = detect_lines(e, p);
    ASSERT_FALSE(segs.empty()) << alpha;
    const auto longest = *std::max_element(segs.begin(), segs.end(),
                                           [](const auto& a, const auto& b) { return a.length < b.length; });
    double a = std::atan2(-(longest.p2.y - longest.p1.y), longest.p2.x - longest.p1.x) * 180.0 / std::numbers::pi;
    if (a >= 90.0) a -= 180.0;
    if (a < -90.0) a += 180.0;
    double err = std::abs(a - alpha);
    if (alpha == 90.0) err = std::min(err, std::abs(a + 90.0));
    EXPECT_LE(err, 1.0) << alpha << " got " << a;
  }
}

TEST(HoughParams, Validation) {
  HoughParams p;
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.theta_step = 0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = p;
  bad.num_peaks = 0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = p;
  bad.nhood = NHood{4, 3};
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = p;
  bad.fill_gap = -1;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = p;
  bad.min_length = 0.5;
  EXPECT_THROW(bad.validate(), ParameterError);
}
