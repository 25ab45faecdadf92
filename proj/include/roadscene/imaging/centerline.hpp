#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/fit.hpp"
#include "roadscene/imaging/contour.hpp"

namespace roadscene::imaging {

/// How a contour becomes a curve.
enum class ContourFit {
  boundary,    // fit the traced boundary itself
  centerline,  // fit the midline between the two sides of an elongated region
};

namespace detail {

/// Pixels inside a closed contour: everything a 4-connected flood from
/// outside the contour's bounding box cannot reach.
struct Region {
  long x0 = 0, y0 = 0;
  long w = 0, h = 0;
  std::vector<char> inside;

  bool contains(long x, long y) const noexcept {
    const long lx = x - x0;
    const long ly = y - y0;
    return lx >= 0 && ly >= 0 && lx < w && ly < h && inside[static_cast<std::size_t>(ly * w + lx)];
  }
};

inline Region fill_contour(const std::vector<Point2>& pts) {
  long minx = std::numeric_limits<long>::max(), miny = minx;
  long maxx = std::numeric_limits<long>::min(), maxy = maxx;
  for (const auto& p : pts) {
    minx = std::min(minx, std::lround(p.x));
    miny = std::min(miny, std::lround(p.y));
    maxx = std::max(maxx, std::lround(p.x));
    maxy = std::max(maxy, std::lround(p.y));
  }
  Region r{minx - 1, miny - 1, maxx - minx + 3, maxy - miny + 3, {}};
  std::vector<char> wall(static_cast<std::size_t>(r.w * r.h), 0);
  for (const auto& p : pts) wall[static_cast<std::size_t>((std::lround(p.y) - r.y0) * r.w + (std::lround(p.x) - r.x0))] = 1;
  std::vector<char> outside(wall.size(), 0);
  std::queue<Pixel> queue;
  queue.push({0, 0});
  outside[0] = 1;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop();
    for (const Pixel d : {Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1}}) {
      const Pixel q{p.x + d.x, p.y + d.y};
      if (q.x < 0 || q.y < 0 || q.x >= r.w || q.y >= r.h) continue;
      const auto i = static_cast<std::size_t>(q.y * r.w + q.x);
      if (outside[i] || wall[i]) continue;
      outside[i] = 1;
      queue.push(q);
    }
  }
  r.inside.resize(wall.size());
  for (std::size_t i = 0; i < wall.size(); ++i) r.inside[i] = !outside[i];
  return r;
}

/// Contour index nearest to the centroid of the region pixels farthest (in
/// 8-connected steps) from `source`.
inline std::size_t farthest_tip(const Region& region, const std::vector<Point2>& pts, Pixel source) {
  std::vector<long> dist(region.inside.size(), -1);
  auto index = [&](Pixel p) { return static_cast<std::size_t>((p.y - region.y0) * region.w + (p.x - region.x0)); };
  std::queue<Pixel> queue;
  queue.push(source);
  dist[index(source)] = 0;
  long best = 0;
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop();
    const long d = dist[index(p)];
    if (d > best) {
      best = d;
      sx = sy = 0.0;
      n = 0;
    }
    if (d == best) {
      sx += static_cast<double>(p.x);
      sy += static_cast<double>(p.y);
      ++n;
    }
    for (const Pixel step : kRing) {
      const Pixel q{p.x + step.x, p.y + step.y};
      if (!region.contains(q.x, q.y) || dist[index(q)] >= 0) continue;
      dist[index(q)] = d + 1;
      queue.push(q);
    }
  }
  const Point2 centroid{sx / static_cast<double>(n), sy / static_cast<double>(n)};
  std::size_t tip = 0;
  double tip_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dd = geometry::distance(pts[i], centroid);
    if (dd < tip_dist) {
      tip_dist = dd;
      tip = i;
    }
  }
  return tip;
}

/// `count` points spaced uniformly by chord length along an open polyline.
inline std::vector<Point2> resample(const std::vector<Point2>& line, std::size_t count) {
  std::vector<double> s(line.size(), 0.0);
  for (std::size_t i = 1; i < line.size(); ++i) s[i] = s[i - 1] + geometry::distance(line[i - 1], line[i]);
  std::vector<Point2> out(count);
  if (line.size() == 1 || s.back() == 0.0) {
    std::fill(out.begin(), out.end(), line.front());
    return out;
  }
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = s.back() * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 2 < line.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double a = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out[k] = line[seg] + a * (line[seg + 1] - line[seg]);
  }
  return out;
}

/// Symmetric moving average whose window shrinks at the ends, so both
/// endpoints stay fixed.
inline std::vector<Point2> smooth(const std::vector<Point2>& line, std::size_t half_window) {
  std::vector<Point2> out(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const std::size_t h = std::min({half_window, i, line.size() - 1 - i});
    Point2 acc;
    for (std::size_t j = i - h; j <= i + h; ++j) acc += line[j];
    out[i] = (1.0 / static_cast<double>(2 * h + 1)) * acc;
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kCenterlineSmoothing = 2;

/// Midline of the region bounded by a closed contour.
///
/// The two tips are found by a double sweep of 8-connected breadth-first
/// search through the filled region; the contour splits at the tips into two
/// sides, which are resampled by chord length and averaged pointwise. A
/// one-pixel-wide curve traces out and back along itself, so its midline is
/// the curve. The result runs from the tip with the smaller (x, y).
inline std::vector<Point2> centerline(const Contour& contour, std::size_t smoothing = kCenterlineSmoothing) {
  const auto& pts = contour.points;
  require(!pts.empty(), ErrorCode::too_few_points, "empty contour");
  if (!contour.closed || pts.size() < 3) return pts;

  const auto region = detail::fill_contour(pts);
  auto pixel = [](Point2 p) { return detail::Pixel{std::lround(p.x), std::lround(p.y)}; };
  const std::size_t u = detail::farthest_tip(region, pts, pixel(pts.front()));
  const std::size_t v = detail::farthest_tip(region, pts, pixel(pts[u]));
  if (u == v) return {pts[u]};

  const std::size_t n = pts.size();
  std::vector<Point2> side_a{pts[u]};
  for (std::size_t i = (u + 1) % n; i != (v + 1) % n; i = (i + 1) % n) side_a.push_back(pts[i]);
  std::vector<Point2> side_b{pts[u]};
  for (std::size_t i = (u + n - 1) % n; i != (v + n - 1) % n; i = (i + n - 1) % n) side_b.push_back(pts[i]);

  const std::size_t count = std::max(side_a.size(), side_b.size());
  const auto a = detail::resample(side_a, count);
  const auto b = detail::resample(side_b, count);
  std::vector<Point2> mid(count);
  for (std::size_t k = 0; k < count; ++k) mid[k] = 0.5 * (a[k] + b[k]);
  mid = detail::smooth(mid, smoothing);

  const Point2 s = mid.front();
  const Point2 e = mid.back();
  if (e.x < s.x || (e.x == s.x && e.y < s.y)) std::reverse(mid.begin(), mid.end());
  return mid;
}

/// Every `stride`-th point starting with the first.
inline std::vector<Point2> subsample(const std::vector<Point2>& pts, std::size_t stride) {
  require(stride >= 1, ErrorCode::invalid_argument, "stride must be positive");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
  return out;
}

/// Subsamples the contour (or its midline) with `stride` and fits a clamped
/// cubic with `n_ctrl` control points under chord-length parameterization.
inline geometry::FitResult contour_to_spline(const Contour& contour, std::size_t n_ctrl, std::size_t stride,
                                             ContourFit mode = ContourFit::boundary) {
  require(stride >= 1, ErrorCode::invalid_argument, "stride must be positive");
  std::vector<Point2> pts;
  bool closed = false;
  if (mode == ContourFit::centerline) {
    const auto line = centerline(contour);
    pts = subsample(line, stride);
    // keep the far tip so the fitted road reaches both ends
    if ((line.size() - 1) % stride != 0) pts.push_back(line.back());
  } else {
    pts = subsample(contour.points, stride);
    closed = contour.closed;
    if (closed && !pts.empty()) pts.push_back(pts.front());
  }
  if (pts.size() < n_ctrl) {
    fail(ErrorCode::too_few_points, std::to_string(contour.points.size()) + " contour points at stride " +
                                        std::to_string(stride) + " leave fewer than " + std::to_string(n_ctrl) +
                                        " fitting points");
  }
  return geometry::fit_spline(pts, n_ctrl, closed);
}

}  // namespace roadscene::imaging
