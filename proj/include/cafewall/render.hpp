#pragma once

#include <vector>

#include "cafewall/hough.hpp"
#include "cafewall/image.hpp"

namespace cafewall {

/// Edge pixels white on black.
RgbImage render_edges(const EdgeMap& edges);

/// Binary map with each segment drawn over it as a `thickness`-px line.
RgbImage render_overlay(const EdgeMap& edges, const std::vector<LineSegment>& segments, Rgb colour = {0, 255, 0},
                        int thickness = 3);

/// Rasterized pixels of the segment p1 -> p2 (Bresenham), p1 first.
std::vector<PixelPoint> line_pixels(PixelPoint p1, PixelPoint p2);

}  // namespace cafewall
