#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "cafewall/dog.hpp"
#include "cafewall/experiments.hpp"
#include "cafewall/hough.hpp"
#include "cafewall/io.hpp"
#include "cafewall/parallel.hpp"
#include "cafewall/serialize.hpp"
#include "cafewall/stimulus.hpp"
#include "cafewall/tilt.hpp"

namespace py = pybind11;
using namespace cafewall;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

void require_2d(const py::buffer_info& b, const char* what) {
  if (b.ndim != 2) throw ParameterError(std::string(what) + ": expected a 2-D array");
}

GrayImage to_gray(const F64& a) {
  const auto b = a.request();
  require_2d(b, "image");
  const auto* p = static_cast<const double*>(b.ptr);
  return GrayImage(static_cast<int>(b.shape[1]), static_cast<int>(b.shape[0]),
                   std::vector<double>(p, p + b.size));
}

EdgeMap to_edges(const U8& a) {
  const auto b = a.request();
  require_2d(b, "edges");
  const auto* p = static_cast<const std::uint8_t*>(b.ptr);
  EdgeMap e(static_cast<int>(b.shape[1]), static_cast<int>(b.shape[0]));
  for (py::ssize_t i = 0; i < b.size; ++i) e.data()[static_cast<std::size_t>(i)] = p[i] ? 1 : 0;
  return e;
}

template <typename T>
py::array_t<T> to_numpy(int width, int height, std::span<const T> data) {
  py::array_t<T> out({height, width});
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(T));
  return out;
}

py::array_t<double> to_numpy(const GrayImage& g) { return to_numpy<double>(g.width(), g.height(), g.data()); }
py::array_t<double> to_numpy(const ResponseMap& r) { return to_numpy<double>(r.width(), r.height(), r.data()); }
py::array_t<std::uint8_t> to_numpy(const EdgeMap& e) {
  return to_numpy<std::uint8_t>(e.width(), e.height(), e.data());
}

py::object json_to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
Json py_to_json(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict cell_dict(const TiltCell& c) {
  py::dict d;
  d["n"] = c.n;
  if (c.absent()) {
    d["mean"] = py::none();
    d["std_err"] = py::none();
    d["mean_signed"] = py::none();
  } else {
    d["mean"] = c.mean_abs_dev;
    d["std_err"] = c.std_err;
    d["mean_signed"] = c.mean_signed_dev;
  }
  return d;
}

py::dict stats_dict(const TiltStats& s) {
  py::dict out;
  for (std::size_t i = 0; i < s.scales.size(); ++i) {
    py::dict row;
    for (auto c : kAllClasses) row[py::str(to_string(c))] = cell_dict(s.cells[i][static_cast<std::size_t>(c)]);
    out[py::float_(s.scales[i])] = row;
  }
  return out;
}

BorderPolicy border_arg(const std::string& s) { return border_policy_from_string(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cafe Wall stimulus, DoG edge maps, Hough line detection and tilt statistics";

  static py::exception<ParameterError> param_exc(m, "ParameterError", PyExc_ValueError);
  static py::exception<RangeError> range_exc(m, "RangeError", PyExc_IndexError);
  static py::exception<IoError> io_exc(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParameterError& e) {
      py::set_error(param_exc, e.what());
    } catch (const RangeError& e) {
      py::set_error(range_exc, e.what());
    } catch (const IoError& e) {
      py::set_error(io_exc, e.what());
    }
  });

  m.def("set_thread_count", &set_thread_count, py::arg("n"), "Worker threads; 0 restores the default.");
  m.def("thread_count", &thread_count);

  // Stimulus
  py::class_<CafeWallSpec>(m, "CafeWallSpec")
      .def(py::init([](int rows, int cols, int tile_px, int mortar_px, std::optional<int> row_shift_px,
                       double tile_dark, double tile_light, double mortar_lum) {
             CafeWallSpec s = CafeWallSpec::make(rows, cols, tile_px, mortar_px);
             if (row_shift_px) s.row_shift_px = *row_shift_px;
             s.tile_dark = tile_dark;
             s.tile_light = tile_light;
             s.mortar_lum = mortar_lum;
             s.validate();
             return s;
           }),
           py::arg("rows") = 3, py::arg("cols") = 8, py::arg("tile_px") = 200, py::arg("mortar_px") = 8,
           py::arg("row_shift_px") = py::none(), py::arg("tile_dark") = 0.0, py::arg("tile_light") = 1.0,
           py::arg("mortar_lum") = 0.5)
      .def_readwrite("rows", &CafeWallSpec::rows)
      .def_readwrite("cols", &CafeWallSpec::cols)
      .def_readwrite("tile_px", &CafeWallSpec::tile_px)
      .def_readwrite("mortar_px", &CafeWallSpec::mortar_px)
      .def_readwrite("row_shift_px", &CafeWallSpec::row_shift_px)
      .def_readwrite("tile_dark", &CafeWallSpec::tile_dark)
      .def_readwrite("tile_light", &CafeWallSpec::tile_light)
      .def_readwrite("mortar_lum", &CafeWallSpec::mortar_lum)
      .def_property_readonly("width", &CafeWallSpec::width)
      .def_property_readonly("height", &CafeWallSpec::height)
      .def("validate", &CafeWallSpec::validate)
      .def("mortar_kind",
           [](const CafeWallSpec& s, int mortar) -> std::optional<std::string> {
             const auto k = mortar_kind(s, mortar);
             if (!k) return std::nullopt;
             return to_string(*k);
           },
           py::arg("mortar"), "'falling', 'rising' or None for mortar m between rows m and m+1.")
      .def("__repr__", [](const CafeWallSpec& s) { return "CafeWallSpec(" + to_json(s).dump() + ")"; });

  m.def("generate_cafe_wall", [](const CafeWallSpec& s) { return to_numpy(generate_cafe_wall(s)); }, py::arg("spec"),
        "Luminance array of shape (height, width) with values in [0, 1].");

  // DoG
  m.def("window_side", [](double sigma_c, double h) { return DoGParams{sigma_c, 2.0, h}.window_side(); },
        py::arg("sigma_c"), py::arg("h") = 8.0);
  m.def("dog_kernel",
        [](double sigma_c, double s, double h) {
          const Kernel k = dog_kernel({sigma_c, s, h});
          return to_numpy<double>(k.side, k.side, k.weights);
        },
        py::arg("sigma_c"), py::arg("s") = 2.0, py::arg("h") = 8.0);
  m.def("dog_response",
        [](const F64& image, double sigma_c, double s, double h, const std::string& border) {
          const GrayImage g = to_gray(image);
          ResponseMap r;
          {
            py::gil_scoped_release release;
            r = dog_response(g, {sigma_c, s, h}, border_arg(border));
          }
          return to_numpy(r);
        },
        py::arg("image"), py::arg("sigma_c"), py::arg("s") = 2.0, py::arg("h") = 8.0, py::arg("border") = "reflect");
  m.def("binarize",
        [](const F64& response, double noise_floor) {
          const auto b = response.request();
          require_2d(b, "response");
          const auto* p = static_cast<const double*>(b.ptr);
          const ResponseMap r(static_cast<int>(b.shape[1]), static_cast<int>(b.shape[0]),
                              std::vector<double>(p, p + b.size));
          return to_numpy(binarize(r, noise_floor));
        },
        py::arg("response"), py::arg("noise_floor") = kDefaultNoiseFloor);
  m.def("edge_maps",
        [](const F64& image, const std::vector<double>& scales, double s, double h, const std::string& border) {
          const GrayImage g = to_gray(image);
          EdgeMapStack st;
          {
            py::gil_scoped_release release;
            st = edge_map_stack(g, scales, s, h, border_arg(border));
          }
          py::list out;
          for (const auto& l : st.layers) {
            py::dict d;
            d["sigma_c"] = l.sigma_c;
            d["response"] = to_numpy(l.response);
            d["edges"] = to_numpy(l.edges);
            out.append(d);
          }
          return out;
        },
        py::arg("image"), py::arg("scales"), py::arg("s") = 2.0, py::arg("h") = 8.0, py::arg("border") = "reflect",
        "One dict per scale with 'sigma_c', 'response' and binary 'edges'.");

  // Hough
  py::class_<HoughParams>(m, "HoughParams")
      .def(py::init([](int num_peaks, int threshold, double fill_gap, double min_length, double theta_step,
                       double rho_step, std::optional<std::pair<int, int>> nhood) {
             HoughParams p;
             p.num_peaks = num_peaks;
             p.threshold = threshold;
             p.fill_gap = fill_gap;
             p.min_length = min_length;
             p.theta_step = theta_step;
             p.rho_step = rho_step;
             if (nhood) p.nhood = NHood{nhood->first, nhood->second};
             p.validate();
             return p;
           }),
           py::arg("num_peaks") = 100, py::arg("threshold") = 3, py::arg("fill_gap") = 40.0,
           py::arg("min_length") = 450.0, py::arg("theta_step") = 1.0, py::arg("rho_step") = 1.0,
           py::arg("nhood") = py::none())
      .def_readwrite("num_peaks", &HoughParams::num_peaks)
      .def_readwrite("threshold", &HoughParams::threshold)
      .def_readwrite("fill_gap", &HoughParams::fill_gap)
      .def_readwrite("min_length", &HoughParams::min_length)
      .def_readwrite("theta_step", &HoughParams::theta_step)
      .def_readwrite("rho_step", &HoughParams::rho_step)
      .def("__repr__", [](const HoughParams& p) { return "HoughParams(" + to_json(p).dump() + ")"; });

  py::class_<LineSegment>(m, "LineSegment")
      .def_property_readonly("p1", [](const LineSegment& s) { return std::make_pair(s.p1.x, s.p1.y); })
      .def_property_readonly("p2", [](const LineSegment& s) { return std::make_pair(s.p2.x, s.p2.y); })
      .def_readonly("theta_deg", &LineSegment::theta_deg)
      .def_readonly("rho", &LineSegment::rho)
      .def_readonly("length", &LineSegment::length)
      .def_readonly("scale", &LineSegment::scale)
      .def_property_readonly("angle", [](const LineSegment& s) { return segment_angle(s); })
      .def("__repr__", [](const LineSegment& s) {
        return "LineSegment((" + std::to_string(s.p1.x) + ", " + std::to_string(s.p1.y) + ") -> (" +
               std::to_string(s.p2.x) + ", " + std::to_string(s.p2.y) + "), length " + format_number(s.length) + ")";
      });

  m.def("hough_transform",
        [](const U8& edges, double theta_step, double rho_step) {
          const HoughAccumulator acc = hough_transform(to_edges(edges), theta_step, rho_step);
          py::array_t<std::uint32_t> votes({acc.theta_count(), acc.rho_count()});
          std::memcpy(votes.mutable_data(), acc.bins().data(), acc.bins().size() * sizeof(std::uint32_t));
          py::dict d;
          d["votes"] = votes;
          d["theta_deg"] = acc.axes().theta_deg;
          std::vector<double> rho(static_cast<std::size_t>(acc.rho_count()));
          for (int r = 0; r < acc.rho_count(); ++r) rho[static_cast<std::size_t>(r)] = acc.axes().rho_value(r);
          d["rho"] = rho;
          return d;
        },
        py::arg("edges"), py::arg("theta_step") = 1.0, py::arg("rho_step") = 1.0,
        "Dict with 'votes' (theta x rho), 'theta_deg' and 'rho' axes.");
  m.def("detect_lines",
        [](const U8& edges, const HoughParams& p, double scale) {
          const EdgeMap e = to_edges(edges);
          py::gil_scoped_release release;
          return detect_lines(e, p, scale);
        },
        py::arg("edges"), py::arg("params") = HoughParams{}, py::arg("scale") = 0.0);

  // Tilt
  m.def("segment_angle", [](std::pair<int, int> p1, std::pair<int, int> p2) {
    return segment_angle(PixelPoint{p1.first, p1.second}, PixelPoint{p2.first, p2.second});
  });
  m.def("classify",
        [](double angle) {
          const auto c = classify(angle);
          return std::make_pair(to_string(c.cls), c.deviation_deg);
        },
        py::arg("angle_deg"), "(class, signed deviation) for an angle in [-90, 90).");

  m.def("analyze_image",
        [](const F64& image, const std::vector<double>& scales, const HoughParams& hough, double s, double h,
           const std::string& border) {
          const GrayImage g = to_gray(image);
          ImageAnalysis a;
          {
            py::gil_scoped_release release;
            a = analyze_image(g, scales, s, h, hough, border_arg(border), kDefaultNoiseFloor, 0, false);
          }
          py::list segs;
          for (const auto& layer : a.segments)
            for (const auto& sg : layer) segs.append(py::cast(sg));
          py::dict d;
          d["segments"] = segs;
          d["stats"] = stats_dict(aggregate(a.records, scales));
          d["stats_csv"] = tilt_stats_csv(aggregate(a.records, scales));
          return d;
        },
        py::arg("image"), py::arg("scales"), py::arg("hough") = HoughParams{}, py::arg("s") = 2.0,
        py::arg("h") = 8.0, py::arg("border") = "reflect",
        "Dict with 'segments', per-scale 'stats' {scale: {class: {n, mean, std_err, mean_signed}}} and 'stats_csv'.");

  // Experiments
  m.def("preset_names", &preset_names);
  m.def("preset_config", [](const std::string& name) { return json_to_py(to_json(preset(name))); }, py::arg("name"));
  m.def("run_experiment",
        [](const py::object& config, const std::filesystem::path& output_dir) {
          ExperimentConfig c = py::isinstance<py::str>(config) ? preset(config.cast<std::string>())
                                                                : experiment_config_from_json(py_to_json(config));
          c.output_dir = output_dir.string();
          ExperimentReport r;
          {
            py::gil_scoped_release release;
            r = run_experiment(c);
          }
          return json_to_py(r.summary);
        },
        py::arg("config"), py::arg("output_dir"),
        "Run a preset (by name) or a config dict; returns the report.json contents.");

  // IO
  m.def("read_png", [](const std::filesystem::path& p) { return to_numpy(read_gray_png(p)); }, py::arg("path"));
  m.def("write_png", [](const std::filesystem::path& p, const F64& image) { write_gray_png(p, to_gray(image)); },
        py::arg("path"), py::arg("image"));
}
