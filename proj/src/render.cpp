#include "cafewall/render.hpp"

#include <cstdlib>

namespace cafewall {

RgbImage render_edges(const EdgeMap& edges) {
  RgbImage out(edges.width(), edges.height());
  auto dst = out.data();
  auto src = edges.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? Rgb{255, 255, 255} : Rgb{0, 0, 0};
  return out;
}

std::vector<PixelPoint> line_pixels(PixelPoint p1, PixelPoint p2) {
  std::vector<PixelPoint> out;
  const int dx = std::abs(p2.x - p1.x);
  const int dy = -std::abs(p2.y - p1.y);
  const int sx = p1.x < p2.x ? 1 : -1;
  const int sy = p1.y < p2.y ? 1 : -1;
  int err = dx + dy;
  PixelPoint p = p1;
  for (;;) {
    out.push_back(p);
    if (p == p2) break;
    const int e2 = 2 * err;
    if (e2 >= dy) err += dy, p.x += sx;
    if (e2 <= dx) err += dx, p.y += sy;
  }
  return out;
}

RgbImage render_overlay(const EdgeMap& edges, const std::vector<LineSegment>& segments, Rgb colour, int thickness) {
  RgbImage out = render_edges(edges);
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  for (const LineSegment& s : segments)
    for (PixelPoint p : line_pixels(s.p1, s.p2))
      for (int oy = lo; oy <= hi; ++oy)
        for (int ox = lo; ox <= hi; ++ox) {
          const int x = p.x + ox, y = p.y + oy;
          if (x >= 0 && y >= 0 && x < out.width() && y < out.height()) out(x, y) = colour;
        }
  return out;
}

}  // namespace cafewall
