#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cafewall/dog.hpp"
#include "cafewall/hough.hpp"
#include "cafewall/serialize.hpp"
#include "cafewall/stimulus.hpp"
#include "cafewall/tilt.hpp"

namespace cafewall {

enum class ExperimentKind { FallingRising, Foveal, Global, ConfigSweep };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct WallConfig {
  std::string label;  ///< file-name stem, e.g. "wall_3x11"
  CafeWallSpec spec;
};

/// Crop covering rows x cols tiles ("crop4x5" is 4 rows by 5 columns).
struct CropConfig {
  std::string label;
  int rows = 4;
  int cols = 5;
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::Global;
  std::vector<WallConfig> walls;
  std::vector<double> scales;
  double surround_ratio = 2.0;
  double window_ratio = 8.0;
  BorderPolicy border = BorderPolicy::Reflect;
  double noise_floor = kDefaultNoiseFloor;
  HoughParams hough;

  // Sampling. falling-rising uses samples_per_set windows per mortar kind at
  // mortar_offset_px; foveal uses every crop x method pair.
  int samples_per_set = 50;
  int mortar_offset_px = 32;
  std::vector<CropConfig> crops;
  std::vector<SamplingMethod> methods;
  int systematic_step_px = 4;
  std::uint64_t seed = 0;

  double histogram_bin_width = 1.0;
  std::vector<double> overlay_scales;  ///< scales rendered as segment overlays
  std::string output_dir = "out";

  void validate() const;
};

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// Embedded parameter set for a named study. Throws ParameterError listing the
/// known names for anything else.
ExperimentConfig preset(const std::string& name);

Json to_json(const ExperimentConfig& config);
/// Keys mirror the struct fields. With "preset" set, the named preset supplies
/// every key the file leaves out.
ExperimentConfig experiment_config_from_json(const Json& j);

/// Pooled statistics of one sample set or whole wall.
struct SetResult {
  std::string label;
  SampleSet samples;                       ///< empty windows for whole-wall analyses
  std::vector<TiltStats> per_sample;       ///< parallel to samples.windows
  std::vector<TiltRecord> records;         ///< every line, in sample then scale order
  std::vector<std::size_t> segment_counts; ///< per sample
  TiltStats pooled;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SetResult> sets;
  std::vector<std::string> files;  ///< relative to config.output_dir, sorted
  Json summary;                    ///< contents of report.json
};

/// Runs the study selected by config.kind and writes every artifact under
/// config.output_dir. Output depends only on the config, not on thread count.
ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport run_falling_rising(const ExperimentConfig& config);
ExperimentReport run_foveal_sets(const ExperimentConfig& config);
ExperimentReport run_global(const ExperimentConfig& config);
ExperimentReport run_config_sweep(const ExperimentConfig& config);

/// Whole-image pipeline: DoG stack, Hough lines and tilt records for each scale.
struct ImageAnalysis {
  EdgeMapStack stack;
  std::vector<std::vector<LineSegment>> segments;  ///< parallel to stack.layers
  std::vector<TiltRecord> records;
};
ImageAnalysis analyze_image(const GrayImage& image, const std::vector<double>& scales, double surround_ratio,
                            double window_ratio, const HoughParams& hough, BorderPolicy border = BorderPolicy::Reflect,
                            double noise_floor = kDefaultNoiseFloor, int sample_id = 0, bool keep_stack = true);

/// Seed of derived stream `index` (splitmix64 of seed + index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Parses "a,b,c" lists and "start:step:stop" ranges (inclusive stop).
std::vector<double> parse_scale_list(const std::string& text);

}  // namespace cafewall
