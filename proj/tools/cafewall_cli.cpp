#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cafewall/dog.hpp"
#include "cafewall/experiments.hpp"
#include "cafewall/hough.hpp"
#include "cafewall/io.hpp"
#include "cafewall/parallel.hpp"
#include "cafewall/render.hpp"
#include "cafewall/serialize.hpp"
#include "cafewall/stimulus.hpp"
#include "cafewall/tilt.hpp"

namespace fs = std::filesystem;
using namespace cafewall;

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitIo = 3;

/// Base directory for outputs whose location was not given explicitly.
fs::path default_out_base() {
  if (const char* env = std::getenv("CAFEWALL_OUT_DIR"); env && *env) return env;
  return ".";
}

struct DogFlags {
  std::string scales;
  double s = 2.0;
  double h = 8.0;
  std::string border = "reflect";
  double noise_floor = kDefaultNoiseFloor;

  /// Empty `default_scales` leaves out --scales.
  void add(CLI::App* app, const std::string& default_scales) {
    scales = default_scales;
    if (!default_scales.empty())
      app->add_option("--scales", scales, "Centre scales sigma_c: list a,b,c or range start:step:stop")
          ->capture_default_str();
    app->add_option("--s", s, "Surround ratio sigma_surround / sigma_c (> 1)")->capture_default_str();
    app->add_option("--h", h, "Window ratio; kernel side = h * sigma_c + 1 (>= 2)")->capture_default_str();
    app->add_option("--border", border, "Border policy")
        ->check(CLI::IsMember({"reflect", "zero"}))
        ->capture_default_str();
    app->add_option("--noise-floor", noise_floor, "Responses at or below this binarize to 0")->capture_default_str();
  }

  [[nodiscard]] std::vector<double> scale_list() const {
    std::vector<double> v = parse_scale_list(scales);
    for (std::size_t i = 0; i < v.size(); ++i) {
      DoGParams{v[i], s, h}.validate();
      if (i > 0 && !(v[i] > v[i - 1])) throw ParameterError("--scales: values must be strictly increasing");
    }
    return v;
  }
  [[nodiscard]] BorderPolicy border_policy() const { return border_policy_from_string(border); }
};

struct HoughFlags {
  HoughParams p;
  std::vector<int> nhood;

  void add(CLI::App* app, int num_peaks) {
    p.num_peaks = num_peaks;
    app->add_option("--theta-step", p.theta_step, "Theta bin width in degrees")->capture_default_str();
    app->add_option("--rho-step", p.rho_step, "Rho bin width in pixels")->capture_default_str();
    app->add_option("--num-peaks", p.num_peaks, "Maximum Hough peaks per edge map")->capture_default_str();
    app->add_option("--threshold", p.threshold, "Minimum votes for a peak")->capture_default_str();
    app->add_option("--nhood", nhood, "Suppression window RHO THETA, both odd (default: about 1/50 of the axes)")
        ->expected(2);
    app->add_option("--fill-gap", p.fill_gap, "Merge gaps up to this many pixels")->capture_default_str();
    app->add_option("--min-length", p.min_length, "Discard segments shorter than this")->capture_default_str();
  }

  [[nodiscard]] HoughParams params() const {
    HoughParams out = p;
    if (!nhood.empty()) out.nhood = NHood{nhood[0], nhood[1]};
    out.validate();
    return out;
  }
};

std::string scale_tag(double s) { return "s" + format_number(s); }

// ---------------------------------------------------------------------------

struct GenerateCmd {
  int rows = 3, cols = 8, tile = 200, mortar = 8;
  int shift = -1;
  double dark = 0.0, light = 1.0, mortar_lum = 0.5;
  std::string out;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("generate", "Write a Cafe Wall stimulus as an 8-bit grayscale PNG");
    c->add_option("--rows", rows, "Tile rows (>= 1)")->capture_default_str();
    c->add_option("--cols", cols, "Tile columns (>= 1)")->capture_default_str();
    c->add_option("--tile", tile, "Tile side T in pixels")->capture_default_str();
    c->add_option("--mortar", mortar, "Mortar thickness M in pixels")->capture_default_str();
    c->add_option("--shift", shift, "Row shift in pixels, 0 <= shift < T (default T/2)");
    c->add_option("--dark", dark, "Dark tile luminance")->capture_default_str();
    c->add_option("--light", light, "Light tile luminance")->capture_default_str();
    c->add_option("--mortar-lum", mortar_lum, "Mortar luminance, between dark and light")->capture_default_str();
    c->add_option("--out", out, "Output PNG (default $CAFEWALL_OUT_DIR/cafewall_<rows>x<cols>.png)");
    c->callback([this] { run(); });
  }

  void run() const {
    CafeWallSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.tile_px = tile;
    spec.mortar_px = mortar;
    spec.row_shift_px = shift >= 0 ? shift : tile / 2;
    spec.tile_dark = dark;
    spec.tile_light = light;
    spec.mortar_lum = mortar_lum;
    spec.validate();
    const fs::path path =
        out.empty() ? default_out_base() / ("cafewall_" + std::to_string(rows) + "x" + std::to_string(cols) + ".png")
                    : fs::path(out);
    const GrayImage img = generate_cafe_wall(spec);
    write_gray_png(path, img);
    std::cout << path.string() << ' ' << img.width() << 'x' << img.height() << '\n';
  }
};

struct EdgemapCmd {
  std::string in, out_dir;
  bool responses = false;
  DogFlags dog;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("edgemap", "Binary and jetwhite DoG edge maps at several scales");
    c->add_option("--in", in, "Input PNG")->required();
    dog.add(c, "4:4:24");
    c->add_option("--out-dir", out_dir, "Output directory (default $CAFEWALL_OUT_DIR/edgemap)");
    c->add_flag("--responses", responses, "Also write 16-bit response PNGs and raw float grids");
    c->callback([this] { run(); });
  }

  void run() const {
    const std::vector<double> scales = dog.scale_list();
    const GrayImage img = read_gray_png(in);
    const fs::path dir = out_dir.empty() ? default_out_base() / "edgemap" : fs::path(out_dir);
    const EdgeMapStack stack = edge_map_stack(img, scales, dog.s, dog.h, dog.border_policy(), dog.noise_floor);
    Json meta{{"input", in}, {"width", img.width()}, {"height", img.height()}, {"surround_ratio", dog.s},
              {"window_ratio", dog.h}, {"border", dog.border}, {"noise_floor", dog.noise_floor}};
    Json layers = Json::array();
    for (const EdgeMapLayer& layer : stack.layers) {
      const std::string tag = scale_tag(layer.sigma_c);
      Json lj{{"sigma_c", layer.sigma_c},
              {"window_side", DoGParams{layer.sigma_c, dog.s, dog.h}.window_side()},
              {"edge_pixels", count_edges(layer.edges)},
              {"binary", "edges_" + tag + ".png"},
              {"jetwhite", "jetwhite_" + tag + ".png"}};
      write_edge_png(dir / ("edges_" + tag + ".png"), layer.edges);
      write_rgb_png(dir / ("jetwhite_" + tag + ".png"), render_jetwhite(layer.response));
      if (responses) {
        const ResponseScaling sc = write_response_png(dir / ("response_" + tag + ".png"), layer.response);
        write_raw_grid(dir / ("response_" + tag + ".f64"), layer.response);
        lj["response"] = "response_" + tag + ".png";
        lj["response_offset"] = sc.offset;
        lj["response_scale"] = sc.scale;
        lj["raw"] = "response_" + tag + ".f64";
      }
      layers.push_back(lj);
    }
    meta["layers"] = layers;
    write_text_file(dir / "edgemap.json", meta.dump(2) + "\n");
    std::cout << dir.string() << ": " << stack.layers.size() << " scales\n";
  }
};

struct AnalyzeCmd {
  std::string in, out_dir, global_csv;
  std::vector<std::string> foveal_csvs;
  std::vector<int> crop_window;
  std::vector<double> overlays;
  double bin_width = 1.0;
  DogFlags dog;
  HoughFlags hough;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("analyze", "Detect lines and tilt statistics in one image, or compare tables");
    c->add_option("--in", in, "Input PNG");
    c->add_option("--crop", crop_window, "Analyze only the window LEFT TOP WIDTH HEIGHT")->expected(4);
    dog.add(c, "4:4:28");
    hough.add(c, 100);
    c->add_option("--bin-width", bin_width, "Histogram bin width in degrees")->capture_default_str();
    c->add_option("--overlay", overlays, "Scales to render as segment overlays");
    c->add_option("--global", global_csv, "Compare mode: global tilt table (CSV)");
    c->add_option("--foveal", foveal_csvs, "Compare mode: foveal tilt tables (CSV), labelled by file stem");
    c->add_option("--out-dir", out_dir, "Output directory (default $CAFEWALL_OUT_DIR/analyze)");
    c->callback([this] { run(); });
  }

  void run() const {
    const fs::path dir = out_dir.empty() ? default_out_base() / "analyze" : fs::path(out_dir);
    if (!global_csv.empty() || !foveal_csvs.empty()) {
      if (global_csv.empty() || foveal_csvs.empty())
        throw ParameterError("--global and --foveal must be given together");
      if (!in.empty()) throw ParameterError("--in cannot be combined with --global/--foveal");
      const TiltStats global = parse_tilt_stats_csv(read_text_file(global_csv));
      std::vector<NamedTiltStats> foveal;
      for (const auto& f : foveal_csvs)
        foveal.push_back({fs::path(f).stem().string(), parse_tilt_stats_csv(read_text_file(f))});
      write_text_file(dir / "comparison.csv", comparison_csv(compare_local_global(foveal, global)));
      std::cout << (dir / "comparison.csv").string() << '\n';
      return;
    }
    if (in.empty()) throw ParameterError("--in is required unless comparing with --global/--foveal");
    const std::vector<double> scales = dog.scale_list();
    const HoughParams hp = hough.params();
    for (double o : overlays)
      if (std::find(scales.begin(), scales.end(), o) == scales.end())
        throw ParameterError("--overlay " + format_number(o) + " is not one of --scales");
    if (!(bin_width > 0.0)) throw ParameterError("--bin-width must be > 0");
    GrayImage img = read_gray_png(in);
    if (!crop_window.empty())
      img = crop(img, CropWindow{crop_window[0], crop_window[1], crop_window[2], crop_window[3]});

    const ImageAnalysis a =
        analyze_image(img, scales, dog.s, dog.h, hp, dog.border_policy(), dog.noise_floor, 0, !overlays.empty());
    std::vector<LineSegment> all;
    for (const auto& s : a.segments) all.insert(all.end(), s.begin(), s.end());
    write_text_file(dir / "segments.csv", segments_csv(all));
    write_text_file(dir / "tilt_stats.csv", tilt_stats_csv(aggregate(a.records, scales)));
    write_text_file(dir / "hist_H.csv", histogram_csv(histogram(a.records, OrientationClass::H, bin_width, false, scales)));
    write_text_file(dir / "hist_V.csv", histogram_csv(histogram(a.records, OrientationClass::V, bin_width, false, scales)));
    write_text_file(dir / "hist_D.csv", histogram_csv(diagonal_histogram(a.records, bin_width, false, scales)));
    for (double o : overlays) {
      const auto i = static_cast<std::size_t>(std::find(scales.begin(), scales.end(), o) - scales.begin());
      write_rgb_png(dir / ("overlay_" + scale_tag(o) + ".png"), render_overlay(a.stack.layers[i].edges, a.segments[i]));
    }
    std::cout << dir.string() << ": " << all.size() << " segments\n";
    std::cout << tilt_stats_csv(aggregate(a.records, scales));
  }
};

struct ExperimentCmd {
  std::string name, config, out_dir;
  std::optional<std::uint64_t> seed;
  int samples = 0;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("experiment", "Run a named study or a JSON config end to end");
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    c->add_option("--name", name, "Preset: " + names);
    c->add_option("--config", config, "JSON config file (keys mirror the config fields)");
    c->add_option("--out-dir", out_dir,
                  "Run directory (default $CAFEWALL_OUT_DIR/<config output_dir>, else the config's output_dir)");
    c->add_option("--seed", seed, "RNG seed for sampled crops (generated and printed when absent)");
    c->add_option("--samples", samples, "Override samples per set (falling-rising, foveal)");
    c->callback([this] { run(); });
  }

  void run() const {
    if (name.empty() == config.empty()) throw ParameterError("exactly one of --name or --config is required");
    const Json file = config.empty() ? Json() : Json::parse(read_text_file(config));
    ExperimentConfig cfg = config.empty() ? preset(name) : experiment_config_from_json(file);
    if (samples < 0) throw ParameterError("--samples must be positive");
    if (samples > 0) cfg.samples_per_set = samples;
    if (seed) {
      cfg.seed = *seed;
    } else if (!file.contains("seed")) {
      std::random_device rd;
      cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
    std::cout << "seed " << cfg.seed << '\n';
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    else if (const char* env = std::getenv("CAFEWALL_OUT_DIR"); env && *env) cfg.output_dir = (fs::path(env) / cfg.output_dir).string();
    cfg.validate();
    const ExperimentReport report = run_experiment(cfg);
    std::cout << cfg.output_dir << ": " << report.files.size() << " files\n";
  }
};

struct RenderCmd {
  std::string in, kind = "overlay", out;
  double sigma = 12.0;
  DogFlags dog;
  HoughFlags hough;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("render", "Render one scale of an image as binary, jetwhite, overlay or accumulator");
    c->add_option("--in", in, "Input PNG")->required();
    c->add_option("--sigma", sigma, "Centre scale sigma_c")->capture_default_str();
    c->add_option("--kind", kind, "What to draw")
        ->check(CLI::IsMember({"binary", "jetwhite", "overlay", "accumulator"}))
        ->capture_default_str();
    dog.add(c, "");
    hough.add(c, 100);
    c->add_option("--out", out, "Output PNG")->required();
    c->callback([this] { run(); });
  }

  void run() const {
    const DoGParams params{sigma, dog.s, dog.h};
    params.validate();
    const HoughParams hp = hough.params();
    const GrayImage img = read_gray_png(in);
    const ResponseMap resp = dog_response(img, params, dog.border_policy());
    if (kind == "jetwhite") {
      write_rgb_png(out, render_jetwhite(resp));
      return;
    }
    const EdgeMap edges = binarize(resp, dog.noise_floor);
    if (kind == "binary") {
      write_edge_png(out, edges);
    } else if (kind == "accumulator") {
      write_accumulator_png(out, hough_transform(edges, hp.theta_step, hp.rho_step));
    } else {
      write_rgb_png(out, render_overlay(edges, detect_lines(edges, hp, sigma)));
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cafe Wall stimuli, multi-scale DoG edge maps, Hough line tilt analysis"};
  app.require_subcommand(1);
  // --h is the window ratio, so help has no short form.
  app.set_help_flag("--help", "Print this help message and exit");
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = available parallelism)")->capture_default_str();
  GenerateCmd generate;
  EdgemapCmd edgemap;
  AnalyzeCmd analyze;
  ExperimentCmd experiment;
  RenderCmd render;
  generate.add(app);
  edgemap.add(app);
  analyze.add(app);
  experiment.add(app);
  render.add(app);
  app.parse_complete_callback([&] { set_thread_count(threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
