#include "cafewall/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "cafewall/io.hpp"
#include "cafewall/parallel.hpp"
#include "cafewall/render.hpp"

namespace cafewall {

namespace fs = std::filesystem;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::FallingRising: return "falling-rising";
    case ExperimentKind::Foveal: return "foveal";
    case ExperimentKind::Global: return "global";
    case ExperimentKind::ConfigSweep: return "config-sweep";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::FallingRising, ExperimentKind::Foveal, ExperimentKind::Global, ExperimentKind::ConfigSweep})
    if (to_string(k) == name) return k;
  throw ParameterError("experiment kind: unknown '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> parse_scale_list(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ParameterError("scales: cannot parse '" + s + "' in '" + text + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::istringstream is(text);
    for (std::string p; std::getline(is, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ParameterError("scales: range must be start:step:stop, got '" + text + "'");
    const double start = number(parts[0]), step = number(parts[1]), stop = number(parts[2]);
    if (!(step > 0.0)) throw ParameterError("scales: range step must be positive");
    if (stop < start) throw ParameterError("scales: range stop below start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  } else {
    std::istringstream is(text);
    for (std::string p; std::getline(is, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw ParameterError("scales: empty list");
  return out;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (walls.empty()) throw ParameterError("experiment: at least one wall is required");
  for (const auto& w : walls) {
    if (w.label.empty()) throw ParameterError("experiment: wall label must not be empty");
    w.spec.validate();
  }
  if (scales.empty()) throw ParameterError("experiment: scales must not be empty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    DoGParams{scales[i], surround_ratio, window_ratio}.validate();
    if (i > 0 && !(scales[i] > scales[i - 1])) throw ParameterError("experiment: scales must be strictly increasing");
  }
  hough.validate();
  if (!(noise_floor >= 0.0)) throw ParameterError("experiment: noise_floor must be >= 0");
  if (!(histogram_bin_width > 0.0)) throw ParameterError("experiment: histogram_bin_width must be > 0");
  for (double s : overlay_scales)
    if (std::find(scales.begin(), scales.end(), s) == scales.end())
      throw ParameterError("experiment: overlay scale " + format_number(s) + " is not in scales");
  if (kind == ExperimentKind::FallingRising || kind == ExperimentKind::Foveal) {
    if (samples_per_set < 1) throw ParameterError("experiment: samples_per_set must be >= 1");
  }
  if (kind == ExperimentKind::FallingRising && mortar_offset_px < 0)
    throw ParameterError("experiment: mortar_offset_px must be >= 0");
  if (kind == ExperimentKind::Foveal) {
    if (crops.empty()) throw ParameterError("experiment: foveal runs need at least one crop");
    if (methods.empty()) throw ParameterError("experiment: foveal runs need at least one sampling method");
    for (auto m : methods)
      if (m == SamplingMethod::MortarCentered)
        throw ParameterError("experiment: foveal methods are systematic or random");
    for (const auto& c : crops)
      if (c.rows < 1 || c.cols < 1 || c.label.empty()) throw ParameterError("experiment: bad crop '" + c.label + "'");
    if (systematic_step_px < 0) throw ParameterError("experiment: systematic_step_px must be >= 0");
  }
}

namespace {

std::vector<double> range(double start, double step, double stop) {
  std::vector<double> v;
  for (double s = start; s <= stop + 1e-9; s += step) v.push_back(s);
  return v;
}

WallConfig wall(int rows, int cols, int tile, int mortar) {
  return {"wall_" + std::to_string(rows) + "x" + std::to_string(cols), CafeWallSpec::make(rows, cols, tile, mortar)};
}

HoughParams hough_preset(int num_peaks, double fill_gap, double min_length) {
  HoughParams p;
  p.num_peaks = num_peaks;
  p.threshold = 3;
  p.fill_gap = fill_gap;
  p.min_length = min_length;
  return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"falling-rising", "foveal", "global", "config-sweep"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "falling-rising") {
    c.kind = ExperimentKind::FallingRising;
    c.walls = {wall(3, 9, 400, 16)};
    c.scales = {8, 16, 24, 32};
    c.hough = hough_preset(50, 80, 960);
    c.samples_per_set = 50;
    c.mortar_offset_px = 32;
  } else if (name == "foveal") {
    c.kind = ExperimentKind::Foveal;
    c.walls = {wall(9, 14, 200, 8)};
    c.scales = range(4, 4, 28);
    c.hough = hough_preset(100, 40, 450);
    c.samples_per_set = 50;
    c.crops = {{"crop4x5", 4, 5}, {"crop5x5", 5, 5}, {"crop5x6", 5, 6}};
    c.methods = {SamplingMethod::Systematic, SamplingMethod::Random};
    c.systematic_step_px = 4;
  } else if (name == "global") {
    c.kind = ExperimentKind::Global;
    c.walls = {wall(9, 14, 200, 8)};
    c.scales = range(4, 4, 28);
    c.hough = hough_preset(1000, 40, 450);
  } else if (name == "config-sweep") {
    c.kind = ExperimentKind::ConfigSweep;
    c.walls = {wall(3, 11, 200, 8), wall(5, 5, 200, 8), wall(5, 13, 200, 8),
               wall(7, 11, 200, 8), wall(11, 7, 200, 8), wall(11, 11, 200, 8)};
    c.scales = range(4, 4, 28);
    c.hough = hough_preset(1000, 40, 450);
    c.overlay_scales = {12, 28};
  } else {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw ParameterError("unknown preset '" + name + "' (known presets: " + list + ")");
  }
  c.output_dir = name;
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["kind"] = to_string(c.kind);
  Json walls = Json::array();
  for (const auto& w : c.walls) walls.push_back(Json{{"label", w.label}, {"stimulus", to_json(w.spec)}});
  j["walls"] = walls;
  j["scales"] = c.scales;
  j["surround_ratio"] = c.surround_ratio;
  j["window_ratio"] = c.window_ratio;
  j["border"] = to_string(c.border);
  j["noise_floor"] = c.noise_floor;
  j["hough"] = to_json(c.hough);
  j["samples_per_set"] = c.samples_per_set;
  j["mortar_offset_px"] = c.mortar_offset_px;
  Json crops = Json::array();
  for (const auto& cr : c.crops) crops.push_back(Json{{"label", cr.label}, {"rows", cr.rows}, {"cols", cr.cols}});
  j["crops"] = crops;
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["systematic_step_px"] = c.systematic_step_px;
  j["seed"] = c.seed;
  j["rng"] = kRngAlgorithm;
  j["histogram_bin_width"] = c.histogram_bin_width;
  j["overlay_scales"] = c.overlay_scales;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  check_keys(j,
             {"preset", "name", "kind", "walls", "scales", "surround_ratio", "window_ratio", "border", "noise_floor",
              "hough", "samples_per_set", "mortar_offset_px", "crops", "methods", "systematic_step_px", "seed", "rng",
              "histogram_bin_width", "overlay_scales", "output_dir"},
             "config");
  ExperimentConfig c;
  if (j.contains("preset")) {
    c = preset(j.at("preset").get<std::string>());
  } else if (!j.contains("kind")) {
    throw ParameterError("config: either 'preset' or 'kind' is required");
  }
  try {
    if (j.contains("kind")) c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (c.name.empty()) c.name = to_string(c.kind);
    if (j.contains("walls")) {
      c.walls.clear();
      for (const Json& w : j.at("walls")) {
        check_keys(w, {"label", "stimulus"}, "wall");
        CafeWallSpec spec = cafe_wall_spec_from_json(w.at("stimulus"));
        std::string label = w.value("label", "wall_" + std::to_string(spec.rows) + "x" + std::to_string(spec.cols));
        c.walls.push_back({label, spec});
      }
    }
    if (j.contains("scales")) {
      const Json& s = j.at("scales");
      c.scales = s.is_string() ? parse_scale_list(s.get<std::string>()) : s.get<std::vector<double>>();
    }
    if (j.contains("surround_ratio")) c.surround_ratio = j.at("surround_ratio").get<double>();
    if (j.contains("window_ratio")) c.window_ratio = j.at("window_ratio").get<double>();
    if (j.contains("border")) c.border = border_policy_from_string(j.at("border").get<std::string>());
    if (j.contains("noise_floor")) c.noise_floor = j.at("noise_floor").get<double>();
    if (j.contains("hough")) {
      // Partial hough blocks override the preset's values only.
      Json merged = to_json(c.hough);
      for (const auto& [k, v] : j.at("hough").items()) merged[k] = v;
      c.hough = hough_params_from_json(merged);
    }
    if (j.contains("samples_per_set")) c.samples_per_set = j.at("samples_per_set").get<int>();
    if (j.contains("mortar_offset_px")) c.mortar_offset_px = j.at("mortar_offset_px").get<int>();
    if (j.contains("crops")) {
      c.crops.clear();
      for (const Json& cr : j.at("crops")) {
        check_keys(cr, {"label", "rows", "cols"}, "crop");
        CropConfig cc{"", cr.at("rows").get<int>(), cr.at("cols").get<int>()};
        cc.label = cr.value("label", "crop" + std::to_string(cc.rows) + "x" + std::to_string(cc.cols));
        c.crops.push_back(cc);
      }
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const Json& m : j.at("methods")) c.methods.push_back(sampling_method_from_string(m.get<std::string>()));
    }
    if (j.contains("systematic_step_px")) c.systematic_step_px = j.at("systematic_step_px").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rng") && j.at("rng").get<std::string>() != kRngAlgorithm)
      throw ParameterError("config: unsupported rng '" + j.at("rng").get<std::string>() + "'");
    if (j.contains("histogram_bin_width")) c.histogram_bin_width = j.at("histogram_bin_width").get<double>();
    if (j.contains("overlay_scales")) c.overlay_scales = j.at("overlay_scales").get<std::vector<double>>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct LayerResult {
  std::vector<LineSegment> segments;
  std::vector<TiltRecord> records;
};

/// One scale of one image. `on_edges` sees the binary map before it is dropped.
template <typename OnEdges>
LayerResult analyze_layer(const GrayImage& image, double sigma, const ExperimentConfig& c, int sample_id,
                          OnEdges&& on_edges) {
  const DoGParams dog{sigma, c.surround_ratio, c.window_ratio};
  EdgeMap edges = binarize(dog_response(image, dog, c.border), c.noise_floor);
  LayerResult out;
  out.segments = detect_lines(edges, c.hough, sigma);
  out.records = tilt_records(out.segments, sample_id);
  on_edges(edges, out.segments);
  return out;
}

/// Thread-safe record of emitted files.
class Output {
 public:
  explicit Output(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "': " + ec.message());
  }

  [[nodiscard]] const fs::path& root() const noexcept { return root_; }

  void text(const std::string& rel, const std::string& content) {
    write_text_file(root_ / rel, content);
    add(rel);
  }
  void json(const std::string& rel, const Json& j) { text(rel, j.dump(2) + "\n"); }
  void gray(const std::string& rel, const GrayImage& img) {
    write_gray_png(root_ / rel, img);
    add(rel);
  }
  void rgb(const std::string& rel, const RgbImage& img) {
    write_rgb_png(root_ / rel, img);
    add(rel);
  }
  void add(const std::string& rel) {
    std::lock_guard lock(mutex_);
    files_.push_back(rel);
  }
  std::vector<std::string> files() {
    std::lock_guard lock(mutex_);
    std::vector<std::string> f = files_;
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
  }

 private:
  fs::path root_;
  std::mutex mutex_;
  std::vector<std::string> files_;
};

Json to_json(const TiltCell& cell) {
  if (cell.absent()) return Json{{"n", 0}};
  return Json{{"n", cell.n},
              {"mean_abs_dev", cell.mean_abs_dev},
              {"std_err", cell.std_err},
              {"mean_signed_dev", cell.mean_signed_dev}};
}

Json to_json(const TiltStats& stats) {
  Json rows = Json::array();
  for (std::size_t s = 0; s < stats.scales.size(); ++s) {
    Json row{{"sigma_c", stats.scales[s]}};
    for (auto c : kAllClasses) row[to_string(c)] = to_json(stats.cells[s][static_cast<std::size_t>(c)]);
    rows.push_back(row);
  }
  return rows;
}

std::string scale_tag(double s) { return "s" + format_number(s); }

std::string nan_or(double v, bool present) { return present ? format_number(v) : "NaN"; }

/// One row per (sample, scale, class): per-sample means for box plots.
std::string per_sample_csv(const SetResult& set) {
  std::string out = "sample,left,top,sigma_c,class,n,mean_abs_dev,std_err,mean_signed_dev\n";
  for (std::size_t i = 0; i < set.per_sample.size(); ++i) {
    const CropWindow& w = set.samples.windows[i];
    const TiltStats& st = set.per_sample[i];
    for (std::size_t s = 0; s < st.scales.size(); ++s)
      for (auto c : kAllClasses) {
        const TiltCell& cell = st.cells[s][static_cast<std::size_t>(c)];
        out += std::to_string(i) + ',' + std::to_string(w.left) + ',' + std::to_string(w.top) + ',' +
               format_number(st.scales[s]) + ',' + to_string(c) + ',' + std::to_string(cell.n) + ',' +
               nan_or(cell.mean_abs_dev, !cell.absent()) + ',' + nan_or(cell.std_err, !cell.absent()) + ',' +
               nan_or(cell.mean_signed_dev, !cell.absent()) + '\n';
      }
  }
  return out;
}

void write_histograms(Output& out, const std::string& stem, const std::vector<TiltRecord>& records,
                      const ExperimentConfig& c) {
  const double w = c.histogram_bin_width;
  out.text(stem + "_hist_H.csv", histogram_csv(histogram(records, OrientationClass::H, w, false, c.scales)));
  out.text(stem + "_hist_V.csv", histogram_csv(histogram(records, OrientationClass::V, w, false, c.scales)));
  out.text(stem + "_hist_D.csv", histogram_csv(diagonal_histogram(records, w, false, c.scales)));
}

/// Crops each window and analyzes every scale. Samples run concurrently.
SetResult analyze_samples(const GrayImage& image, std::string label, SampleSet samples, const ExperimentConfig& c) {
  SetResult set;
  set.label = std::move(label);
  const std::size_t n = samples.windows.size();
  std::vector<std::vector<TiltRecord>> recs(n);
  set.segment_counts.assign(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const GrayImage sample = crop(image, samples.windows[i]);
    for (double sigma : c.scales) {
      LayerResult r = analyze_layer(sample, sigma, c, static_cast<int>(i), [](const EdgeMap&, const auto&) {});
      set.segment_counts[i] += r.segments.size();
      recs[i].insert(recs[i].end(), r.records.begin(), r.records.end());
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    set.per_sample.push_back(aggregate(recs[i], c.scales));
    set.records.insert(set.records.end(), recs[i].begin(), recs[i].end());
  }
  set.pooled = aggregate(set.records, c.scales);
  set.samples = std::move(samples);
  return set;
}

void write_sample_set(Output& out, const SetResult& set, const ExperimentConfig& c) {
  out.json(set.label + "_samples.json", to_json(set.samples));
  out.text(set.label + "_per_sample.csv", per_sample_csv(set));
  out.text(set.label + "_stats.csv", tilt_stats_csv(set.pooled));
  write_histograms(out, set.label, set.records, c);
}

/// Whole-wall analyses, one task per (wall, scale).
std::vector<SetResult> analyze_walls(Output& out, const ExperimentConfig& c) {
  const std::size_t nw = c.walls.size(), ns = c.scales.size();
  std::vector<GrayImage> images(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    images[w] = generate_cafe_wall(c.walls[w].spec);
    out.gray(c.walls[w].label + "_stimulus.png", images[w]);
  }
  std::vector<LayerResult> layers(nw * ns);
  parallel_for(nw * ns, [&](std::size_t k) {
    const std::size_t w = k / ns, s = k % ns;
    const double sigma = c.scales[s];
    const bool overlay = std::find(c.overlay_scales.begin(), c.overlay_scales.end(), sigma) != c.overlay_scales.end();
    layers[k] = analyze_layer(images[w], sigma, c, 0, [&](const EdgeMap& edges, const std::vector<LineSegment>& segs) {
      if (overlay) out.rgb(c.walls[w].label + "_overlay_" + scale_tag(sigma) + ".png", render_overlay(edges, segs));
    });
  });

  std::vector<SetResult> sets;
  for (std::size_t w = 0; w < nw; ++w) {
    SetResult set;
    set.label = c.walls[w].label;
    set.samples.source_width = images[w].width();
    set.samples.source_height = images[w].height();
    std::vector<LineSegment> segments;
    for (std::size_t s = 0; s < ns; ++s) {
      const LayerResult& r = layers[w * ns + s];
      segments.insert(segments.end(), r.segments.begin(), r.segments.end());
      set.records.insert(set.records.end(), r.records.begin(), r.records.end());
    }
    set.segment_counts = {segments.size()};
    set.pooled = aggregate(set.records, c.scales);
    out.text(set.label + "_segments.csv", segments_csv(segments));
    out.text(set.label + "_stats.csv", tilt_stats_csv(set.pooled));
    write_histograms(out, set.label, set.records, c);
    sets.push_back(std::move(set));
  }
  return sets;
}

ExperimentReport finish(Output& out, const ExperimentConfig& c, std::vector<SetResult> sets) {
  out.json("config.json", to_json(c));
  out.add("manifest.json");
  out.add("report.json");

  ExperimentReport report;
  report.config = c;
  report.sets = std::move(sets);
  report.files = out.files();

  Json summary;
  summary["experiment"] = to_string(c.kind);
  summary["config"] = to_json(c);
  Json sets_json = Json::array();
  for (const SetResult& s : report.sets) {
    Json sj;
    sj["label"] = s.label;
    if (!s.samples.windows.empty()) {
      sj["method"] = to_string(s.samples.method);
      sj["seed"] = s.samples.seed;
      sj["samples"] = s.samples.windows.size();
    }
    std::size_t segs = 0;
    for (auto n : s.segment_counts) segs += n;
    sj["segments"] = segs;
    sj["pooled"] = to_json(s.pooled);
    sets_json.push_back(sj);
  }
  summary["sets"] = sets_json;
  summary["files"] = report.files;
  report.summary = summary;

  write_text_file(out.root() / "report.json", summary.dump(2) + "\n");
  write_text_file(out.root() / "manifest.json", Json{{"files", report.files}}.dump(2) + "\n");
  return report;
}

void check_kind(const ExperimentConfig& c, ExperimentKind kind) {
  c.validate();
  if (c.kind != kind) throw ParameterError("experiment: config kind is '" + to_string(c.kind) + "', expected '" + to_string(kind) + "'");
}

}  // namespace

ImageAnalysis analyze_image(const GrayImage& image, const std::vector<double>& scales, double surround_ratio,
                            double window_ratio, const HoughParams& hough, BorderPolicy border, double noise_floor,
                            int sample_id, bool keep_stack) {
  ExperimentConfig c;
  c.scales = scales;
  c.surround_ratio = surround_ratio;
  c.window_ratio = window_ratio;
  c.hough = hough;
  c.border = border;
  c.noise_floor = noise_floor;
  hough.validate();
  for (std::size_t i = 0; i < scales.size(); ++i) {
    DoGParams{scales[i], surround_ratio, window_ratio}.validate();
    if (i > 0 && !(scales[i] > scales[i - 1])) throw ParameterError("analyze_image: scales must be strictly increasing");
  }

  ImageAnalysis out;
  if (keep_stack) {
    out.stack = edge_map_stack(image, scales, surround_ratio, window_ratio, border, noise_floor);
    out.segments.resize(scales.size());
    parallel_for(scales.size(), [&](std::size_t i) {
      out.segments[i] = detect_lines(out.stack.layers[i].edges, hough, scales[i]);
    });
    for (const auto& segs : out.segments) {
      auto r = tilt_records(segs, sample_id);
      out.records.insert(out.records.end(), r.begin(), r.end());
    }
    return out;
  }
  std::vector<LayerResult> layers(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    layers[i] = analyze_layer(image, scales[i], c, sample_id, [](const EdgeMap&, const auto&) {});
  });
  for (auto& l : layers) {
    out.records.insert(out.records.end(), l.records.begin(), l.records.end());
    out.segments.push_back(std::move(l.segments));
  }
  return out;
}

ExperimentReport run_falling_rising(const ExperimentConfig& c) {
  check_kind(c, ExperimentKind::FallingRising);
  Output out(c.output_dir);
  const CafeWallSpec& spec = c.walls.front().spec;
  const GrayImage image = generate_cafe_wall(spec);
  out.gray("stimulus.png", image);

  std::vector<SetResult> sets;
  for (MortarKind kind : {MortarKind::Falling, MortarKind::Rising}) {
    SampleSet samples = mortar_centered_windows(spec, kind, c.samples_per_set, c.mortar_offset_px);
    sets.push_back(analyze_samples(image, to_string(kind), std::move(samples), c));
    write_sample_set(out, sets.back(), c);
  }

  std::vector<TiltRecord> combined = sets[0].records;
  combined.insert(combined.end(), sets[1].records.begin(), sets[1].records.end());
  out.text("combined_hist_H_normalized.csv",
           histogram_csv(histogram(combined, OrientationClass::H, c.histogram_bin_width, true, c.scales)));

  std::string direction = "sigma_c,falling_n,falling_mean_signed_H,rising_n,rising_mean_signed_H\n";
  for (std::size_t s = 0; s < c.scales.size(); ++s) {
    const TiltCell& f = sets[0].pooled.cells[s][static_cast<std::size_t>(OrientationClass::H)];
    const TiltCell& r = sets[1].pooled.cells[s][static_cast<std::size_t>(OrientationClass::H)];
    direction += format_number(c.scales[s]) + ',' + std::to_string(f.n) + ',' + nan_or(f.mean_signed_dev, !f.absent()) +
                 ',' + std::to_string(r.n) + ',' + nan_or(r.mean_signed_dev, !r.absent()) + '\n';
  }
  out.text("direction.csv", direction);
  return finish(out, c, std::move(sets));
}

ExperimentReport run_foveal_sets(const ExperimentConfig& c) {
  check_kind(c, ExperimentKind::Foveal);
  Output out(c.output_dir);
  const CafeWallSpec& spec = c.walls.front().spec;
  const GrayImage image = generate_cafe_wall(spec);
  out.gray("stimulus.png", image);
  const ImageDims dims{image.width(), image.height()};

  std::vector<SetResult> sets;
  std::uint64_t index = 0;
  for (const CropConfig& crop_cfg : c.crops) {
    const CropDims crop = crop_dims_for_tiles(spec, crop_cfg.rows, crop_cfg.cols);
    for (SamplingMethod method : c.methods) {
      const std::uint64_t seed = derive_seed(c.seed, index++);
      SampleSet samples = method == SamplingMethod::Systematic
                              ? systematic_windows(dims, crop, c.samples_per_set, c.systematic_step_px, seed)
                              : random_windows(dims, crop, c.samples_per_set, seed);
      sets.push_back(analyze_samples(image, crop_cfg.label + "_" + to_string(method), std::move(samples), c));
      const SetResult& set = sets.back();
      write_sample_set(out, set, c);
      if (!c.overlay_scales.empty()) {
        const GrayImage first = cafewall::crop(image, set.samples.windows.front());
        for (double sigma : c.overlay_scales)
          analyze_layer(first, sigma, c, 0, [&](const EdgeMap& edges, const std::vector<LineSegment>& segs) {
            out.rgb(set.label + "_sample0_overlay_" + scale_tag(sigma) + ".png", render_overlay(edges, segs));
          });
      }
    }
  }
  return finish(out, c, std::move(sets));
}

ExperimentReport run_global(const ExperimentConfig& c) {
  check_kind(c, ExperimentKind::Global);
  Output out(c.output_dir);
  return finish(out, c, analyze_walls(out, c));
}

ExperimentReport run_config_sweep(const ExperimentConfig& c) {
  check_kind(c, ExperimentKind::ConfigSweep);
  Output out(c.output_dir);
  return finish(out, c, analyze_walls(out, c));
}

ExperimentReport run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::FallingRising: return run_falling_rising(c);
    case ExperimentKind::Foveal: return run_foveal_sets(c);
    case ExperimentKind::Global: return run_global(c);
    case ExperimentKind::ConfigSweep: return run_config_sweep(c);
  }
  throw ParameterError("experiment: unknown kind");
}

}  // namespace cafewall
