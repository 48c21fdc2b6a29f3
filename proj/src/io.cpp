#include "cafewall/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <vector>

namespace cafewall {

namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

void ensure_parent(const fs::path& path) {
  if (!path.has_parent_path()) return;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
}

[[noreturn]] void png_error_handler(png_structp, png_const_charp msg) { throw IoError(std::string("png: ") + msg); }
void png_warning_handler(png_structp, png_const_charp) {}

/// Rows are width * channels * (depth / 8) bytes, or ceil(width / 8) for 1-bit.
void write_png(const fs::path& path, int width, int height, int bit_depth, int color_type,
               const std::vector<std::uint8_t>& bytes) {
  if (width <= 0 || height <= 0) throw IoError("png: cannot write an empty image to '" + path.string() + "'");
  ensure_parent(path);
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  if (!png) throw IoError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp& p;
    png_infop& i;
    ~Guard() { png_destroy_write_struct(&p, &i); }
  } guard{png, info};
  if (!info) throw IoError("png: out of memory");

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = bytes.size() / static_cast<std::size_t>(height);
  for (int y = 0; y < height; ++y)
    png_write_row(png, bytes.data() + static_cast<std::size_t>(y) * stride);
  png_write_end(png, nullptr);
}

struct RawPng {
  int width = 0;
  int height = 0;
  int bit_depth = 8;  // 8 or 16
  int channels = 1;
  bool has_alpha = false;
  std::vector<std::uint8_t> bytes;

  [[nodiscard]] std::size_t stride() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(channels) * (bit_depth / 8);
  }
};

/// Palette and sub-byte images are expanded to 8 bits; 16-bit samples are kept.
RawPng read_png(const fs::path& path) {
  auto file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError("'" + path.string() + "' is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  if (!png) throw IoError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp& p;
    png_infop& i;
    ~Guard() { png_destroy_read_struct(&p, &i, nullptr); }
  } guard{png, info};
  if (!info) throw IoError("png: out of memory");

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  RawPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.channels = png_get_channels(png, info);
  out.has_alpha = (png_get_color_type(png, info) & PNG_COLOR_MASK_ALPHA) != 0;
  if (out.bit_depth != 8 && out.bit_depth != 16) throw IoError("png: unsupported bit depth");
  out.bytes.resize(out.stride() * static_cast<std::size_t>(out.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.bytes.data() + y * out.stride();
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return out;
}

/// Sample `c` of pixel `i`, widened to 16 bits.
std::uint16_t sample(const RawPng& raw, std::size_t i, int c) noexcept {
  const std::size_t k = i * static_cast<std::size_t>(raw.channels) + static_cast<std::size_t>(c);
  if (raw.bit_depth == 8) return static_cast<std::uint16_t>(raw.bytes[k] * 257);
  return static_cast<std::uint16_t>((raw.bytes[2 * k] << 8) | raw.bytes[2 * k + 1]);
}

std::uint8_t to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

void write_gray_png(const fs::path& path, const GrayImage& image) {
  std::vector<std::uint8_t> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(), to_byte);
  write_png(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_GRAY, bytes);
}

GrayImage read_gray_png(const fs::path& path) {
  const RawPng raw = read_png(path);
  const std::size_t n = static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height);
  const int colour = raw.channels - (raw.has_alpha ? 1 : 0);
  const double full = raw.bit_depth == 8 ? 255.0 : 65535.0;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v;
    if (colour == 1) {
      v = sample(raw, i, 0) / 65535.0;
    } else {
      // Rec. 709 luma on the stored (non-linear) values.
      v = (0.2126 * sample(raw, i, 0) + 0.7152 * sample(raw, i, 1) + 0.0722 * sample(raw, i, 2)) / 65535.0;
    }
    if (raw.has_alpha) v *= sample(raw, i, raw.channels - 1) / 65535.0;
    // Requantize so 8-bit files read back exactly as k / 255.
    values[i] = std::clamp(std::round(v * full) / full, 0.0, 1.0);
  }
  return GrayImage(raw.width, raw.height, std::move(values));
}

void write_edge_png(const fs::path& path, const EdgeMap& edges) {
  const std::size_t stride = (static_cast<std::size_t>(edges.width()) + 7) / 8;
  std::vector<std::uint8_t> bytes(stride * static_cast<std::size_t>(edges.height()), 0);
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x)
      if (edges(x, y)) bytes[y * stride + static_cast<std::size_t>(x) / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
  write_png(path, edges.width(), edges.height(), 1, PNG_COLOR_TYPE_GRAY, bytes);
}

EdgeMap read_edge_png(const fs::path& path) {
  const RawPng raw = read_png(path);
  const int colour = raw.channels - (raw.has_alpha ? 1 : 0);
  EdgeMap edges(raw.width, raw.height);
  auto out = edges.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool on = false;
    for (int c = 0; c < colour; ++c) on = on || sample(raw, i, c) != 0;
    out[i] = on ? 1 : 0;
  }
  return edges;
}

void write_rgb_png(const fs::path& path, const RgbImage& image) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(image.size() * 3);
  for (const Rgb& p : image.data()) {
    bytes.push_back(p.r);
    bytes.push_back(p.g);
    bytes.push_back(p.b);
  }
  write_png(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, bytes);
}

fs::path response_sidecar_path(const fs::path& png_path) {
  fs::path p = png_path;
  p += ".scale.txt";
  return p;
}

ResponseScaling write_response_png(const fs::path& path, const ResponseMap& response) {
  ResponseScaling sc;
  if (!response.empty()) {
    const auto [lo, hi] = std::minmax_element(response.data().begin(), response.data().end());
    sc.offset = *lo;
    sc.scale = (*hi - *lo) / 65535.0;
  }
  std::vector<std::uint8_t> bytes;
  bytes.reserve(response.size() * 2);
  for (double v : response.data()) {
    const double code = sc.scale > 0.0 ? std::round((v - sc.offset) / sc.scale) : 0.0;
    const auto q = static_cast<std::uint16_t>(std::clamp(code, 0.0, 65535.0));
    bytes.push_back(static_cast<std::uint8_t>(q >> 8));
    bytes.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  write_png(path, response.width(), response.height(), 16, PNG_COLOR_TYPE_GRAY, bytes);

  std::ostringstream os;
  os << std::setprecision(17) << "offset " << sc.offset << "\nscale " << sc.scale << "\n";
  write_text_file(response_sidecar_path(path), os.str());
  return sc;
}

ResponseMap read_response_png(const fs::path& path) {
  const RawPng raw = read_png(path);
  if (raw.bit_depth != 16 || raw.channels != 1) throw IoError("'" + path.string() + "' is not a 16-bit gray PNG");
  std::istringstream is(read_text_file(response_sidecar_path(path)));
  ResponseScaling sc;
  std::string key;
  double value = 0.0;
  int seen = 0;
  while (is >> key >> value) {
    if (key == "offset") sc.offset = value, seen |= 1;
    if (key == "scale") sc.scale = value, seen |= 2;
  }
  if (seen != 3) throw IoError("malformed response sidecar for '" + path.string() + "'");
  ResponseMap out(raw.width, raw.height);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = sc.offset + sc.scale * sample(raw, i, 0);
  return out;
}

void write_raw_grid(const fs::path& path, const ResponseMap& response) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "'");
  os << "CWGRID f64 " << response.width() << ' ' << response.height() << '\n';
  for (double v : response.data()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
    os.write(b, 8);
  }
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

ResponseMap read_raw_grid(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::string magic, type;
  int w = -1, h = -1;
  is >> magic >> type >> w >> h;
  if (magic != "CWGRID" || type != "f64" || w < 0 || h < 0 || is.get() != '\n')
    throw IoError("'" + path.string() + "' is not a raw grid");
  ResponseMap out(w, h);
  for (double& v : out.data()) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated raw grid '" + path.string() + "'");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    v = std::bit_cast<double>(bits);
  }
  return out;
}

void write_accumulator_png(const fs::path& path, const HoughAccumulator& acc) {
  const int w = acc.theta_count();
  const int h = acc.rho_count();
  const auto& bins = acc.bins();
  const std::uint32_t peak = bins.empty() ? 0 : *std::max_element(bins.begin(), bins.end());
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 2);
  for (int r = 0; r < h; ++r)
    for (int t = 0; t < w; ++t) {
      const auto q = peak ? static_cast<std::uint16_t>(
                                (static_cast<std::uint64_t>(acc.votes(r, t)) * 65535u + peak / 2) / peak)
                          : std::uint16_t{0};
      const std::size_t k = (static_cast<std::size_t>(r) * w + t) * 2;
      bytes[k] = static_cast<std::uint8_t>(q >> 8);
      bytes[k + 1] = static_cast<std::uint8_t>(q & 0xff);
    }
  write_png(path, w, h, 16, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_text_file(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "'");
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace cafewall
