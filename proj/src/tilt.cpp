#include "cafewall/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

namespace cafewall {

namespace {

constexpr double kHalfInterval = 22.5;

std::size_t class_index(OrientationClass c) noexcept { return static_cast<std::size_t>(c); }

/// Order-independent sum: values are summed in ascending order.
double sorted_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

TiltCell make_cell(std::vector<double> abs_devs, std::vector<double> signed_devs) {
  TiltCell cell;
  cell.n = abs_devs.size();
  if (cell.n == 0) return cell;
  const double n = static_cast<double>(cell.n);
  cell.mean_abs_dev = sorted_sum(abs_devs) / n;
  cell.mean_signed_dev = sorted_sum(signed_devs) / n;
  if (cell.n >= 2) {
    std::vector<double> sq;
    sq.reserve(abs_devs.size());
    for (double v : abs_devs) sq.push_back((v - cell.mean_abs_dev) * (v - cell.mean_abs_dev));
    const double var = sorted_sum(sq) / (n - 1.0);
    cell.std_err = std::sqrt(var) / std::sqrt(n);
  }
  return cell;
}

std::vector<double> scales_present(const std::vector<TiltRecord>& records) {
  std::vector<double> s;
  for (const auto& r : records) s.push_back(r.scale);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::optional<std::size_t> find_scale(const std::vector<double>& grid, double scale) noexcept {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == scale) return i;
  return std::nullopt;
}

DeviationHistogram build_histogram(const std::vector<TiltRecord>& records, OrientationClass cls, bool diagonals,
                                   double bin_width, bool normalized, const std::vector<double>& scale_grid) {
  if (!(bin_width > 0.0)) throw ParameterError("histogram: bin_width must be > 0");
  DeviationHistogram hist;
  hist.cls = cls;
  hist.merged_diagonals = diagonals;
  hist.bin_width = bin_width;
  hist.normalized = normalized;
  hist.scales = scale_grid.empty() ? scales_present(records) : scale_grid;

  const auto kmin = static_cast<long long>(std::floor(-kHalfInterval / bin_width));
  const auto kmax = static_cast<long long>(std::ceil(kHalfInterval / bin_width)) - 1;
  for (long long k = kmin; k <= kmax; ++k) hist.bin_lower.push_back(static_cast<double>(k) * bin_width);
  hist.counts.assign(hist.scales.size(), std::vector<double>(hist.bin_lower.size(), 0.0));

  auto matches = [&](OrientationClass c) {
    return diagonals ? (c == OrientationClass::D1 || c == OrientationClass::D2) : c == cls;
  };
  for (const auto& r : records) {
    if (!matches(r.cls)) continue;
    const auto si = find_scale(hist.scales, r.scale);
    if (!si) continue;
    auto k = static_cast<long long>(std::floor(r.deviation_deg / bin_width));
    k = std::clamp(k, kmin, kmax);
    hist.counts[*si][static_cast<std::size_t>(k - kmin)] += 1.0;
  }
  if (normalized) {
    for (auto& row : hist.counts) {
      double total = 0.0;
      for (double c : row) total += c;
      if (total > 0.0)
        for (double& c : row) c /= total;
    }
  }
  return hist;
}

std::string format_scale(double s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

}  // namespace

std::string to_string(OrientationClass c) {
  switch (c) {
    case OrientationClass::H: return "H";
    case OrientationClass::V: return "V";
    case OrientationClass::D1: return "D1";
    case OrientationClass::D2: return "D2";
  }
  return "?";
}

std::optional<OrientationClass> orientation_class_from_string(const std::string& name) {
  for (auto c : kAllClasses)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

double segment_angle(PixelPoint p1, PixelPoint p2) {
  double dx = p2.x - p1.x;
  double dy_up = -(p2.y - p1.y);
  if (dx == 0.0 && dy_up == 0.0) throw ParameterError("segment_angle: degenerate segment (p1 == p2)");
  // Orient rightward so that a left-right mirror negates the angle exactly.
  if (dx < 0.0) {
    dx = -dx;
    dy_up = -dy_up;
  }
  double deg = std::atan2(dy_up, dx) * (180.0 / std::numbers::pi);
  if (deg >= 90.0) deg -= 180.0;
  return deg;
}

double segment_angle(const LineSegment& seg) { return segment_angle(seg.p1, seg.p2); }

Classification classify(double a) {
  if (!(a >= -90.0 && a < 90.0)) throw ParameterError("classify: angle must lie in [-90, 90)");
  if (a >= -kHalfInterval && a < kHalfInterval) return {OrientationClass::H, a};
  if (a >= kHalfInterval && a < 67.5) return {OrientationClass::D1, a - 45.0};
  if (a >= -67.5 && a < -kHalfInterval) return {OrientationClass::D2, a + 45.0};
  if (a >= 67.5) return {OrientationClass::V, a - 90.0};
  return {OrientationClass::V, a + 90.0};
}

std::vector<TiltRecord> tilt_records(const std::vector<LineSegment>& segments, int sample_id) {
  std::vector<TiltRecord> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) {
    const auto c = classify(segment_angle(seg));
    out.push_back({seg.scale, c.cls, c.deviation_deg, seg.length, sample_id});
  }
  return out;
}

const TiltCell& TiltStats::cell(double scale, OrientationClass c) const {
  const auto i = scale_index(scale);
  if (!i) throw RangeError("TiltStats: scale " + format_scale(scale) + " not in grid");
  return cells[*i][class_index(c)];
}

std::optional<std::size_t> TiltStats::scale_index(double scale) const noexcept { return find_scale(scales, scale); }

TiltStats aggregate(const std::vector<TiltRecord>& records) { return aggregate(records, scales_present(records)); }

TiltStats aggregate(const std::vector<TiltRecord>& records, const std::vector<double>& scale_grid) {
  TiltStats stats;
  stats.scales = scale_grid;
  std::sort(stats.scales.begin(), stats.scales.end());
  const std::size_t ns = stats.scales.size();
  std::vector<std::array<std::vector<double>, 4>> abs_devs(ns);
  std::vector<std::array<std::vector<double>, 4>> signed_devs(ns);
  for (const auto& r : records) {
    const auto si = find_scale(stats.scales, r.scale);
    if (!si) continue;
    abs_devs[*si][class_index(r.cls)].push_back(std::abs(r.deviation_deg));
    signed_devs[*si][class_index(r.cls)].push_back(r.deviation_deg);
  }
  stats.cells.resize(ns);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t c = 0; c < 4; ++c)
      stats.cells[s][c] = make_cell(std::move(abs_devs[s][c]), std::move(signed_devs[s][c]));
  return stats;
}

DeviationHistogram histogram(const std::vector<TiltRecord>& records, OrientationClass cls, double bin_width,
                             bool normalized, const std::vector<double>& scale_grid) {
  return build_histogram(records, cls, false, bin_width, normalized, scale_grid);
}

DeviationHistogram diagonal_histogram(const std::vector<TiltRecord>& records, double bin_width, bool normalized,
                                      const std::vector<double>& scale_grid) {
  return build_histogram(records, OrientationClass::D1, true, bin_width, normalized, scale_grid);
}

std::vector<ComparisonRow> compare_local_global(const std::vector<NamedTiltStats>& foveal, const TiltStats& global) {
  std::vector<ComparisonRow> rows;
  for (const auto& f : foveal) {
    if (f.stats.scales != global.scales)
      throw ParameterError("compare_local_global: scale grid of '" + f.label + "' differs from the global grid");
    for (std::size_t s = 0; s < global.scales.size(); ++s) {
      for (auto c : kAllClasses) {
        ComparisonRow row;
        row.foveal_label = f.label;
        row.scale = global.scales[s];
        row.cls = c;
        row.foveal = f.stats.cells[s][class_index(c)];
        row.global = global.cells[s][class_index(c)];
        if (!row.foveal.absent() && !row.global.absent()) row.delta = row.foveal.mean_abs_dev - row.global.mean_abs_dev;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string format_cell(const TiltCell& cell) {
  if (cell.absent()) return "NaN";
  char buf[64];
  if (cell.n == 1)
    std::snprintf(buf, sizeof buf, "%05.2f±0.0", cell.mean_abs_dev);
  else
    std::snprintf(buf, sizeof buf, "%05.2f±%.2f", cell.mean_abs_dev, cell.std_err);
  return buf;
}

std::string tilt_stats_csv(const TiltStats& stats) {
  std::ostringstream os;
  os << "sigma_c,H,V,D1,D2,n_H,n_V,n_D1,n_D2\n";
  for (std::size_t s = 0; s < stats.scales.size(); ++s) {
    os << format_scale(stats.scales[s]);
    for (auto c : kAllClasses) os << ',' << format_cell(stats.cells[s][class_index(c)]);
    for (auto c : kAllClasses) os << ',' << stats.cells[s][class_index(c)].n;
    os << '\n';
  }
  return os.str();
}

TiltStats parse_tilt_stats_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("sigma_c,H,V,D1,D2", 0) != 0)
    throw ParameterError("parse_tilt_stats_csv: missing header");
  TiltStats stats;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() != 9) throw ParameterError("parse_tilt_stats_csv: expected 9 fields, got '" + line + "'");
    stats.scales.push_back(std::stod(f[0]));
    std::array<TiltCell, 4> row{};
    for (std::size_t c = 0; c < 4; ++c) {
      TiltCell cell;
      cell.n = static_cast<std::size_t>(std::stoull(f[5 + c]));
      const std::string& v = f[1 + c];
      if (v != "NaN") {
        const auto pm = v.find("±");
        if (pm == std::string::npos) throw ParameterError("parse_tilt_stats_csv: bad cell '" + v + "'");
        cell.mean_abs_dev = std::stod(v.substr(0, pm));
        cell.std_err = std::stod(v.substr(pm + std::string("±").size()));
        cell.mean_signed_dev = std::nan("");
      } else {
        cell.n = 0;
      }
      row[c] = cell;
    }
    stats.cells.push_back(row);
  }
  return stats;
}

std::string histogram_csv(const DeviationHistogram& hist) {
  std::ostringstream os;
  os << "bin_lower";
  for (double s : hist.scales) os << ",sigma_" << format_scale(s);
  os << '\n';
  for (std::size_t b = 0; b < hist.bin_lower.size(); ++b) {
    os << format_scale(hist.bin_lower[b]);
    for (std::size_t s = 0; s < hist.scales.size(); ++s) {
      char buf[32];
      if (hist.normalized)
        std::snprintf(buf, sizeof buf, "%.6f", hist.counts[s][b]);
      else
        std::snprintf(buf, sizeof buf, "%.0f", hist.counts[s][b]);
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "foveal_set,sigma_c,class,foveal,global,delta,n_foveal,n_global\n";
  for (const auto& r : rows) {
    os << r.foveal_label << ',' << format_scale(r.scale) << ',' << to_string(r.cls) << ',' << format_cell(r.foveal)
       << ',' << format_cell(r.global) << ',';
    if (r.delta) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%+.2f", *r.delta);
      os << buf;
    } else {
      os << "NaN";
    }
    os << ',' << r.foveal.n << ',' << r.global.n << '\n';
  }
  return os.str();
}

}  // namespace cafewall
