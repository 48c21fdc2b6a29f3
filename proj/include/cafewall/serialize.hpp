#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cafewall/dog.hpp"
#include "cafewall/hough.hpp"
#include "cafewall/stimulus.hpp"

namespace cafewall {

using Json = nlohmann::ordered_json;

std::string to_string(BorderPolicy border);
BorderPolicy border_policy_from_string(const std::string& name);

SamplingMethod sampling_method_from_string(const std::string& name);
MortarKind mortar_kind_from_string(const std::string& name);

// Keys mirror the struct fields. Readers reject unknown keys and fill missing
// ones from the struct defaults.

Json to_json(const CafeWallSpec& spec);
CafeWallSpec cafe_wall_spec_from_json(const Json& j);

Json to_json(const HoughParams& params);
HoughParams hough_params_from_json(const Json& j);

Json to_json(const CropWindow& window);
CropWindow crop_window_from_json(const Json& j);

/// Manifest form, including the generator identifier.
Json to_json(const SampleSet& samples);
SampleSet sample_set_from_json(const Json& j);

/// One record per line: scale,theta_deg,rho,theta_index,rho_index,x1,y1,x2,y2,length
std::string segments_csv(const std::vector<LineSegment>& segments);
std::vector<LineSegment> parse_segments_csv(const std::string& text);

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

/// Rejects keys of `j` outside `allowed`, naming `context` in the error.
void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& context);

}  // namespace cafewall
