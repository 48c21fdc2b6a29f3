#include "cafewall/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace cafewall {

std::string to_string(BorderPolicy border) { return border == BorderPolicy::Reflect ? "reflect" : "zero"; }

BorderPolicy border_policy_from_string(const std::string& name) {
  if (name == "reflect") return BorderPolicy::Reflect;
  if (name == "zero") return BorderPolicy::Zero;
  throw ParameterError("border: expected 'reflect' or 'zero', got '" + name + "'");
}

SamplingMethod sampling_method_from_string(const std::string& name) {
  for (auto m : {SamplingMethod::Systematic, SamplingMethod::Random, SamplingMethod::MortarCentered})
    if (to_string(m) == name) return m;
  throw ParameterError("sampling method: unknown '" + name + "'");
}

MortarKind mortar_kind_from_string(const std::string& name) {
  if (name == "falling") return MortarKind::Falling;
  if (name == "rising") return MortarKind::Rising;
  throw ParameterError("mortar kind: expected 'falling' or 'rising', got '" + name + "'");
}

void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& context) {
  if (!j.is_object()) throw ParameterError(context + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParameterError(context + ": unknown key '" + key + "'");
}

namespace {

template <typename T>
void read_field(const Json& j, const char* key, T& out, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParameterError(context + ": bad value for '" + key + "'");
  }
}

}  // namespace

Json to_json(const CafeWallSpec& s) {
  return Json{{"rows", s.rows},           {"cols", s.cols},
              {"tile_px", s.tile_px},     {"mortar_px", s.mortar_px},
              {"tile_dark", s.tile_dark}, {"tile_light", s.tile_light},
              {"mortar_lum", s.mortar_lum}, {"row_shift_px", s.row_shift_px}};
}

CafeWallSpec cafe_wall_spec_from_json(const Json& j) {
  const std::string ctx = "stimulus";
  check_keys(j, {"rows", "cols", "tile_px", "mortar_px", "tile_dark", "tile_light", "mortar_lum", "row_shift_px"}, ctx);
  CafeWallSpec s;
  read_field(j, "rows", s.rows, ctx);
  read_field(j, "cols", s.cols, ctx);
  read_field(j, "tile_px", s.tile_px, ctx);
  read_field(j, "mortar_px", s.mortar_px, ctx);
  s.row_shift_px = s.tile_px / 2;
  read_field(j, "tile_dark", s.tile_dark, ctx);
  read_field(j, "tile_light", s.tile_light, ctx);
  read_field(j, "mortar_lum", s.mortar_lum, ctx);
  read_field(j, "row_shift_px", s.row_shift_px, ctx);
  s.validate();
  return s;
}

Json to_json(const HoughParams& p) {
  Json j{{"theta_step", p.theta_step}, {"rho_step", p.rho_step}, {"num_peaks", p.num_peaks},
         {"threshold", p.threshold}};
  j["nhood"] = p.nhood ? Json::array({p.nhood->rho, p.nhood->theta}) : Json(nullptr);
  j["fill_gap"] = p.fill_gap;
  j["min_length"] = p.min_length;
  return j;
}

HoughParams hough_params_from_json(const Json& j) {
  const std::string ctx = "hough";
  check_keys(j, {"theta_step", "rho_step", "num_peaks", "threshold", "nhood", "fill_gap", "min_length"}, ctx);
  HoughParams p;
  read_field(j, "theta_step", p.theta_step, ctx);
  read_field(j, "rho_step", p.rho_step, ctx);
  read_field(j, "num_peaks", p.num_peaks, ctx);
  read_field(j, "threshold", p.threshold, ctx);
  read_field(j, "fill_gap", p.fill_gap, ctx);
  read_field(j, "min_length", p.min_length, ctx);
  if (auto it = j.find("nhood"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2) throw ParameterError("hough: nhood must be [rho, theta] or null");
    p.nhood = NHood{(*it)[0].get<int>(), (*it)[1].get<int>()};
  }
  p.validate();
  return p;
}

Json to_json(const CropWindow& w) {
  return Json{{"left", w.left}, {"top", w.top}, {"width", w.width}, {"height", w.height}};
}

CropWindow crop_window_from_json(const Json& j) {
  check_keys(j, {"left", "top", "width", "height"}, "window");
  return CropWindow{j.at("left").get<int>(), j.at("top").get<int>(), j.at("width").get<int>(),
                    j.at("height").get<int>()};
}

Json to_json(const SampleSet& s) {
  Json j;
  j["method"] = to_string(s.method);
  j["mortar"] = s.mortar ? Json(to_string(*s.mortar)) : Json(nullptr);
  j["mortar_index"] = s.mortar_index ? Json(*s.mortar_index) : Json(nullptr);
  j["source_width"] = s.source_width;
  j["source_height"] = s.source_height;
  j["step_px"] = s.step_px;
  j["seed"] = s.seed;
  j["rng"] = kRngAlgorithm;
  Json windows = Json::array();
  for (const CropWindow& w : s.windows) windows.push_back(to_json(w));
  j["windows"] = std::move(windows);
  return j;
}

SampleSet sample_set_from_json(const Json& j) {
  check_keys(j, {"method", "mortar", "mortar_index", "source_width", "source_height", "step_px", "seed", "rng", "windows"},
             "sample set");
  if (j.contains("rng") && j.at("rng").get<std::string>() != kRngAlgorithm)
    throw ParameterError("sample set: unsupported rng '" + j.at("rng").get<std::string>() + "'");
  SampleSet s;
  s.method = sampling_method_from_string(j.at("method").get<std::string>());
  if (j.contains("mortar") && !j.at("mortar").is_null())
    s.mortar = mortar_kind_from_string(j.at("mortar").get<std::string>());
  if (j.contains("mortar_index") && !j.at("mortar_index").is_null()) s.mortar_index = j.at("mortar_index").get<int>();
  s.source_width = j.value("source_width", 0);
  s.source_height = j.value("source_height", 0);
  s.step_px = j.value("step_px", 0);
  s.seed = j.value("seed", std::uint64_t{0});
  for (const Json& w : j.at("windows")) s.windows.push_back(crop_window_from_json(w));
  return s;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string segments_csv(const std::vector<LineSegment>& segments) {
  std::string out = "scale,theta_deg,rho,theta_index,rho_index,x1,y1,x2,y2,length\n";
  for (const LineSegment& s : segments) {
    out += format_number(s.scale) + ',' + format_number(s.theta_deg) + ',' + format_number(s.rho) + ',' +
           std::to_string(s.theta_index) + ',' + std::to_string(s.rho_index) + ',' + std::to_string(s.p1.x) + ',' +
           std::to_string(s.p1.y) + ',' + std::to_string(s.p2.x) + ',' + std::to_string(s.p2.y) + ',' +
           format_number(s.length) + '\n';
  }
  return out;
}

std::vector<LineSegment> parse_segments_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<LineSegment> out;
  if (!std::getline(is, line) || line.rfind("scale,theta_deg", 0) != 0) throw ParameterError("segments: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw ParameterError("segments: expected 10 fields in '" + line + "'");
    try {
      LineSegment s;
      s.scale = std::stod(f[0]);
      s.theta_deg = std::stod(f[1]);
      s.rho = std::stod(f[2]);
      s.theta_index = std::stoi(f[3]);
      s.rho_index = std::stoi(f[4]);
      s.p1 = {std::stoi(f[5]), std::stoi(f[6])};
      s.p2 = {std::stoi(f[7]), std::stoi(f[8])};
      s.length = std::stod(f[9]);
      out.push_back(s);
    } catch (const std::logic_error&) {
      throw ParameterError("segments: malformed record '" + line + "'");
    }
  }
  return out;
}

}  // namespace cafewall
