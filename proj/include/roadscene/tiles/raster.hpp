#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/spline.hpp"
#include "roadscene/imaging/image.hpp"

namespace roadscene::tiles {

using geometry::Point2;
using geometry::Spline2D;
using imaging::BinaryMask;

struct RasterParams {
  std::size_t grid_width = 64;
  std::size_t grid_height = 64;
  double road_halfwidth = 0.5;  // cells
  std::size_t samples = 1024;   // initial spline sampling density

  void validate() const {
    require(grid_width > 0 && grid_height > 0, ErrorCode::invalid_argument, "grid dimensions must be positive");
    require(std::isfinite(road_halfwidth) && road_halfwidth >= 0.0, ErrorCode::invalid_argument,
            "road halfwidth must be nonnegative");
    require(samples >= 2, ErrorCode::invalid_argument, "raster sampling needs at least 2 samples");
  }

  /// Cells kept free around the curve's bounding box.
  double margin() const { return std::ceil(road_halfwidth) + 1.0; }
};

/// Uniform scale plus offset taking spline coordinates to grid coordinates.
/// Cell (i, j) is centered at grid coordinate (i, j).
struct GridTransform {
  double scale = 1.0;
  Point2 offset;

  Point2 apply(Point2 p) const noexcept { return scale * p + offset; }
  Spline2D apply(const Spline2D& s) const { return s.transformed(scale, offset); }
};

/// Cell containing grid point p.
inline long cell_of(double v) noexcept { return static_cast<long>(std::floor(v + 0.5)); }

/// Scales the curve's bounding box, preserving aspect ratio, to fit inside the
/// grid minus a margin of ceil(halfwidth) + 1 cells and centers it on the
/// middle cell (floor(W/2), floor(H/2)).
inline GridTransform grid_transform(const Spline2D& spline, const RasterParams& params) {
  params.validate();
  const auto pts = spline.sample(std::max<std::size_t>(params.samples, 1024));
  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  double length = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    minx = std::min(minx, pts[i].x);
    maxx = std::max(maxx, pts[i].x);
    miny = std::min(miny, pts[i].y);
    maxy = std::max(maxy, pts[i].y);
    if (i > 0) length += geometry::distance(pts[i - 1], pts[i]);
  }
  // rounding in the basis can leave a few ulps of length on a point-like curve
  const double extent = std::max({std::abs(minx), std::abs(maxx), std::abs(miny), std::abs(maxy), 1.0});
  if (!(length > 1e-9 * extent)) fail(ErrorCode::degenerate_spline, "spline has zero length");

  const double avail_w = static_cast<double>(params.grid_width) - 1.0 - 2.0 * params.margin();
  const double avail_h = static_cast<double>(params.grid_height) - 1.0 - 2.0 * params.margin();
  require(avail_w > 0.0 && avail_h > 0.0, ErrorCode::invalid_argument,
          "grid " + std::to_string(params.grid_width) + "x" + std::to_string(params.grid_height) +
              " too small for road halfwidth " + std::to_string(params.road_halfwidth));
  const double bw = maxx - minx;
  const double bh = maxy - miny;
  double scale = std::numeric_limits<double>::infinity();
  if (bw > 0.0) scale = std::min(scale, avail_w / bw);
  if (bh > 0.0) scale = std::min(scale, avail_h / bh);

  const Point2 center{0.5 * (minx + maxx), 0.5 * (miny + maxy)};
  const Point2 target{std::floor(static_cast<double>(params.grid_width) / 2.0),
                      std::floor(static_cast<double>(params.grid_height) / 2.0)};
  return {scale, target - scale * center};
}

namespace detail {

inline void mark(BinaryMask& mask, long x, long y) {
  if (mask.in_bounds(x, y)) mask.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
}

/// Cells crossed by the segment a -> b whose endpoints lie in the same or
/// 8-adjacent cells; a diagonal step adds the cell the segment passes
/// through, so consecutive cells stay 4-adjacent.
inline void walk_segment(BinaryMask& mask, Point2 a, Point2 b) {
  const long ax = cell_of(a.x), ay = cell_of(a.y);
  const long bx = cell_of(b.x), by = cell_of(b.y);
  mark(mask, ax, ay);
  mark(mask, bx, by);
  if (ax == bx || ay == by) return;
  // parameter along a->b where the segment leaves a's cell in x and in y
  const double edge_x = static_cast<double>(ax) + (bx > ax ? 0.5 : -0.5);
  const double edge_y = static_cast<double>(ay) + (by > ay ? 0.5 : -0.5);
  const double sx = (edge_x - a.x) / (b.x - a.x);
  const double sy = (edge_y - a.y) / (b.y - a.y);
  if (sx < sy) mark(mask, bx, ay);
  else mark(mask, ax, by);
}

inline void band_segment(BinaryMask& mask, Point2 a, Point2 b, double halfwidth) {
  const long x0 = static_cast<long>(std::floor(std::min(a.x, b.x) - halfwidth));
  const long x1 = static_cast<long>(std::ceil(std::max(a.x, b.x) + halfwidth));
  const long y0 = static_cast<long>(std::floor(std::min(a.y, b.y) - halfwidth));
  const long y1 = static_cast<long>(std::ceil(std::max(a.y, b.y) + halfwidth));
  for (long y = y0; y <= y1; ++y) {
    for (long x = x0; x <= x1; ++x) {
      const Point2 c{static_cast<double>(x), static_cast<double>(y)};
      if (geometry::distance_to_segment(c, a, b) <= halfwidth) mark(mask, x, y);
    }
  }
}

}  // namespace detail

/// Curve samples in grid coordinates, dense enough that consecutive samples
/// are less than half a cell apart.
inline std::vector<Point2> grid_polyline(const Spline2D& spline, const RasterParams& params,
                                         const GridTransform& transform) {
  std::size_t count = params.samples;
  for (;;) {
    auto pts = spline.sample(count);
    double gap = 0.0;
    for (auto& p : pts) p = transform.apply(p);
    for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, geometry::distance(pts[i - 1], pts[i]));
    if (gap < 0.5) return pts;
    require(count < (std::size_t{1} << 24), ErrorCode::invalid_argument, "spline too long to rasterize");
    count = 2 * count;
  }
}

/// Road mask of the spline after scaling it into the grid: every cell the
/// curve passes through, plus every cell whose center lies within
/// road_halfwidth of it. The mask is 4-connected.
inline BinaryMask rasterize(const Spline2D& spline, const RasterParams& params) {
  const auto transform = grid_transform(spline, params);
  const auto pts = grid_polyline(spline, params, transform);
  BinaryMask mask(params.grid_width, params.grid_height);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    detail::walk_segment(mask, pts[i - 1], pts[i]);
    if (params.road_halfwidth > 0.0) detail::band_segment(mask, pts[i - 1], pts[i], params.road_halfwidth);
  }
  return mask;
}

}  // namespace roadscene::tiles
