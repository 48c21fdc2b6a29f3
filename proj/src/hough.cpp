#include "cafewall/hough.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "cafewall/parallel.hpp"

namespace cafewall {

namespace {

/// 2 * ceil(v / 2) + 1: odd, and greater than v unless v is itself odd.
int odd_window_for(double v) { return std::max(2 * static_cast<int>(std::ceil(v / 2.0)) + 1, 1); }

/// Key for breaking vote ties; lexicographically smaller wins.
struct TieKey {
  int theta_from_vertical_normal;  // |2i - N|: 0 at theta = 90
  int rho_from_zero;
  int rho_index;
  int theta_index;
  auto operator<=>(const TieKey&) const = default;
};

TieKey tie_key(int rho_index, int theta_index, int theta_count, int rho_half) noexcept {
  return {std::abs(2 * theta_index - theta_count), std::abs(rho_index - rho_half), rho_index, theta_index};
}

struct Candidate {
  std::uint32_t votes = 0;
  int rho_index = -1;
  int theta_index = -1;
};

/// True when a is preferred over b.
bool better(const Candidate& a, const Candidate& b, int theta_count, int rho_half) noexcept {
  if (b.rho_index < 0) return a.rho_index >= 0;
  if (a.rho_index < 0) return false;
  if (a.votes != b.votes) return a.votes > b.votes;
  return tie_key(a.rho_index, a.theta_index, theta_count, rho_half) <
         tie_key(b.rho_index, b.theta_index, theta_count, rho_half);
}

struct EdgePixels {
  std::vector<int> xs;
  std::vector<int> ys;
};

EdgePixels collect_edge_pixels(const EdgeMap& edges) {
  EdgePixels p;
  const std::size_t n = count_edges(edges);
  p.xs.reserve(n);
  p.ys.reserve(n);
  for (int y = 0; y < edges.height(); ++y) {
    auto row = edges.row(y);
    for (int x = 0; x < edges.width(); ++x) {
      if (row[static_cast<std::size_t>(x)]) {
        p.xs.push_back(x);
        p.ys.push_back(y);
      }
    }
  }
  return p;
}

}  // namespace

void HoughParams::validate() const {
  if (!(theta_step > 0.0)) throw ParameterError("HoughParams: theta_step must be > 0");
  if (!(rho_step > 0.0)) throw ParameterError("HoughParams: rho_step must be > 0");
  if (num_peaks < 1) throw ParameterError("HoughParams: num_peaks must be >= 1");
  if (nhood && (nhood->rho < 1 || nhood->theta < 1 || nhood->rho % 2 == 0 || nhood->theta % 2 == 0))
    throw ParameterError("HoughParams: nhood dimensions must be positive and odd");
  if (!(fill_gap >= 0.0)) throw ParameterError("HoughParams: fill_gap must be >= 0");
  if (!(min_length >= 1.0)) throw ParameterError("HoughParams: min_length must be >= 1");
}

HoughAxes HoughAxes::make(int width, int height, double theta_step, double rho_step) {
  if (!(theta_step > 0.0)) throw ParameterError("hough: theta_step must be > 0");
  if (!(rho_step > 0.0)) throw ParameterError("hough: rho_step must be > 0");
  if (width < 1 || height < 1) throw ParameterError("hough: empty edge map");

  HoughAxes a;
  a.width = width;
  a.height = height;
  a.theta_step = theta_step;
  a.rho_step = rho_step;
  a.x_origin = (width - 1) / 2.0;
  const double diagonal = std::hypot(width - 1.0, height - 1.0);
  a.rho_half = static_cast<int>(std::ceil(diagonal / rho_step));

  const int n = static_cast<int>(std::ceil(180.0 / theta_step - 1e-9));
  a.theta_deg.resize(static_cast<std::size_t>(n));
  a.cos_theta.resize(static_cast<std::size_t>(n));
  a.sin_theta.resize(static_cast<std::size_t>(n));
  const bool wrap = std::abs(n * theta_step - 180.0) < 1e-9;
  for (int i = 0; i < n; ++i) {
    const double deg = i * theta_step;
    const auto k = static_cast<std::size_t>(i);
    a.theta_deg[k] = deg;
    if (i == 0) {
      a.cos_theta[k] = 1.0;
      a.sin_theta[k] = 0.0;
    } else if (wrap && 2 * i == n) {
      a.cos_theta[k] = 0.0;
      a.sin_theta[k] = 1.0;
    } else if (wrap && 2 * i > n) {
      // Exact negation of the mirrored angle so mirrored images vote identically.
      const auto j = static_cast<std::size_t>(n - i);
      a.cos_theta[k] = -a.cos_theta[j];
      a.sin_theta[k] = a.sin_theta[j];
    } else {
      const double rad = deg * std::numbers::pi / 180.0;
      a.cos_theta[k] = std::cos(rad);
      a.sin_theta[k] = std::sin(rad);
    }
  }
  return a;
}

bool HoughAxes::wraps() const noexcept { return std::abs(theta_count() * theta_step - 180.0) < 1e-9; }

int HoughAxes::rho_bin(double rho) const noexcept {
  return static_cast<int>(std::round(rho / rho_step)) + rho_half;
}

HoughAccumulator::HoughAccumulator(HoughAxes axes)
    : axes_(std::move(axes)),
      bins_(static_cast<std::size_t>(axes_.theta_count()) * static_cast<std::size_t>(axes_.rho_count()), 0u) {}

std::uint64_t HoughAccumulator::total_votes() const noexcept {
  return std::accumulate(bins_.begin(), bins_.end(), std::uint64_t{0});
}

HoughAccumulator hough_transform(const EdgeMap& edges, double theta_step, double rho_step) {
  HoughAccumulator acc(HoughAxes::make(edges.width(), edges.height(), theta_step, rho_step));
  const HoughAxes& axes = acc.axes();
  const EdgePixels px = collect_edge_pixels(edges);
  const int nrho = axes.rho_count();
  auto& bins = acc.bins();

  parallel_for(static_cast<std::size_t>(axes.theta_count()), [&](std::size_t t) {
    const double c = axes.cos_theta[t];
    const double s = axes.sin_theta[t];
    std::vector<double> xterm(static_cast<std::size_t>(axes.width));
    for (int x = 0; x < axes.width; ++x) xterm[static_cast<std::size_t>(x)] = (x - axes.x_origin) * c;
    std::vector<double> yterm(static_cast<std::size_t>(axes.height));
    for (int y = 0; y < axes.height; ++y) yterm[static_cast<std::size_t>(y)] = y * s;

    std::uint32_t* column = bins.data() + t * static_cast<std::size_t>(nrho);
    const std::size_t n = px.xs.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = xterm[static_cast<std::size_t>(px.xs[i])] + yterm[static_cast<std::size_t>(px.ys[i])];
      ++column[axes.rho_bin(rho)];
    }
  });
  return acc;
}

NHood default_nhood(const HoughAccumulator& acc) noexcept {
  return {odd_window_for(acc.rho_count() / 50.0), odd_window_for(acc.theta_count() / 50.0)};
}

std::vector<Peak> hough_peaks(const HoughAccumulator& acc, int num_peaks, int threshold, std::optional<NHood> nhood) {
  if (num_peaks < 1) throw ParameterError("hough_peaks: num_peaks must be >= 1");
  const NHood hood = nhood.value_or(default_nhood(acc));
  if (hood.rho < 1 || hood.theta < 1 || hood.rho % 2 == 0 || hood.theta % 2 == 0)
    throw ParameterError("hough_peaks: nhood dimensions must be positive and odd");

  const int ntheta = acc.theta_count();
  const int nrho = acc.rho_count();
  const int rho_half = acc.axes().rho_half;
  const bool wrap = acc.axes().wraps();
  std::vector<std::uint32_t> h = acc.bins();

  auto column_best = [&](int t) {
    Candidate best;
    const std::uint32_t* col = h.data() + static_cast<std::size_t>(t) * nrho;
    for (int r = 0; r < nrho; ++r) {
      Candidate c{col[r], r, t};
      if (better(c, best, ntheta, rho_half)) best = c;
    }
    return best;
  };

  std::vector<Candidate> best(static_cast<std::size_t>(ntheta));
  for (int t = 0; t < ntheta; ++t) best[static_cast<std::size_t>(t)] = column_best(t);

  std::vector<Peak> peaks;
  std::vector<char> dirty(static_cast<std::size_t>(ntheta), 0);
  const int half_r = hood.rho / 2;
  const int half_t = hood.theta / 2;

  while (static_cast<int>(peaks.size()) < num_peaks) {
    Candidate top;
    for (const auto& c : best)
      if (better(c, top, ntheta, rho_half)) top = c;
    if (top.rho_index < 0 || top.votes == 0 || top.votes < static_cast<std::uint32_t>(std::max(threshold, 0))) break;
    peaks.push_back({top.theta_index, top.rho_index, top.votes});

    for (int dt = -half_t; dt <= half_t; ++dt) {
      int t = top.theta_index + dt;
      bool flip = false;
      if (t < 0 || t >= ntheta) {
        if (!wrap) continue;
        t = t < 0 ? t + ntheta : t - ntheta;
        flip = true;
        if (t < 0 || t >= ntheta) continue;
      }
      std::uint32_t* col = h.data() + static_cast<std::size_t>(t) * nrho;
      for (int dr = -half_r; dr <= half_r; ++dr) {
        int r = top.rho_index + dr;
        if (r < 0 || r >= nrho) continue;
        if (flip) r = nrho - 1 - r;
        col[r] = 0;
      }
      dirty[static_cast<std::size_t>(t)] = 1;
    }
    for (int t = 0; t < ntheta; ++t) {
      if (dirty[static_cast<std::size_t>(t)]) {
        best[static_cast<std::size_t>(t)] = column_best(t);
        dirty[static_cast<std::size_t>(t)] = 0;
      }
    }
  }
  return peaks;
}

std::vector<LineSegment> hough_lines(const EdgeMap& edges, const HoughAccumulator& acc, const std::vector<Peak>& peaks,
                                     double fill_gap, double min_length, double scale) {
  if (!(fill_gap >= 0.0)) throw ParameterError("hough_lines: fill_gap must be >= 0");
  if (!(min_length >= 0.0)) throw ParameterError("hough_lines: min_length must be >= 0");
  const HoughAxes& axes = acc.axes();
  if (edges.width() != axes.width || edges.height() != axes.height)
    throw ParameterError("hough_lines: edge map does not match the accumulator geometry");

  // Group peak slots by theta so each theta needs one pass over the edge pixels.
  std::vector<int> thetas;
  std::vector<std::vector<std::size_t>> slots_by_theta(static_cast<std::size_t>(axes.theta_count()));
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const int t = peaks[k].theta_index;
    if (t < 0 || t >= axes.theta_count() || peaks[k].rho_index < 0 || peaks[k].rho_index >= axes.rho_count())
      throw RangeError("hough_lines: peak outside the accumulator");
    if (slots_by_theta[static_cast<std::size_t>(t)].empty()) thetas.push_back(t);
    slots_by_theta[static_cast<std::size_t>(t)].push_back(k);
  }

  const EdgePixels px = collect_edge_pixels(edges);
  std::vector<std::vector<LineSegment>> per_peak(peaks.size());
  const double gap = fill_gap;
  const double min_sq = min_length * min_length;

  struct OnLine {
    double along;     // position along the line direction
    double residual;  // |rho - bin centre| in bins
    int x;
    int y;
  };

  parallel_for(thetas.size(), [&](std::size_t g) {
    const int t = thetas[g];
    const auto& slots = slots_by_theta[static_cast<std::size_t>(t)];
    std::vector<int> slot_of_rho(static_cast<std::size_t>(axes.rho_count()), -1);
    std::vector<std::vector<OnLine>> members(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto& entry = slot_of_rho[static_cast<std::size_t>(peaks[slots[s]].rho_index)];
      if (entry < 0) entry = static_cast<int>(s);  // duplicate peaks share one pixel list
    }

    const double c = axes.cos_theta[static_cast<std::size_t>(t)];
    const double sn = axes.sin_theta[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < px.xs.size(); ++i) {
      const int x = px.xs[i];
      const int y = px.ys[i];
      const double rho = axes.rho(x, y, t);
      const int bin = axes.rho_bin(rho);
      const int s = slot_of_rho[static_cast<std::size_t>(bin)];
      if (s < 0) continue;
      const double xc = x - axes.x_origin;
      members[static_cast<std::size_t>(s)].push_back(
          {-xc * sn + y * c, std::abs(rho / axes.rho_step - (bin - axes.rho_half)), x, y});
    }

    for (std::size_t s = 0; s < slots.size(); ++s) {
      const Peak& peak = peaks[slots[s]];
      const int shared = slot_of_rho[static_cast<std::size_t>(peak.rho_index)];
      auto& pts = members[static_cast<std::size_t>(shared)];
      if (static_cast<std::size_t>(shared) == s) {
        std::sort(pts.begin(), pts.end(), [](const OnLine& a, const OnLine& b) {
          return std::tie(a.along, a.residual, a.y, a.x) < std::tie(b.along, b.residual, b.y, b.x);
        });
      }
      auto& out = per_peak[slots[s]];
      std::size_t begin = 0;
      while (begin < pts.size()) {
        std::size_t end = begin + 1;
        while (end < pts.size() && pts[end].along - pts[end - 1].along <= gap) ++end;
        // Far endpoint: smallest residual among the pixels furthest along.
        std::size_t last = end - 1;
        while (last > begin && pts[last - 1].along == pts[end - 1].along) --last;
        const OnLine& a = pts[begin];
        const OnLine& b = pts[last];
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double len_sq = dx * dx + dy * dy;
        if (len_sq >= min_sq) {
          LineSegment seg;
          seg.p1 = {a.x, a.y};
          seg.p2 = {b.x, b.y};
          seg.theta_index = t;
          seg.rho_index = peak.rho_index;
          seg.theta_deg = axes.theta_deg[static_cast<std::size_t>(t)];
          seg.rho = axes.rho_value(peak.rho_index);
          seg.length = std::sqrt(len_sq);
          seg.scale = scale;
          out.push_back(seg);
        }
        begin = end;
      }
    }
  });

  std::vector<LineSegment> lines;
  for (auto& v : per_peak) lines.insert(lines.end(), v.begin(), v.end());
  return lines;
}

std::vector<LineSegment> detect_lines(const EdgeMap& edges, const HoughParams& params, double scale) {
  params.validate();
  const HoughAccumulator acc = hough_transform(edges, params.theta_step, params.rho_step);
  const auto peaks = hough_peaks(acc, params.num_peaks, params.threshold, params.nhood);
  return hough_lines(edges, acc, peaks, params.fill_gap, params.min_length, scale);
}

}  // namespace cafewall
