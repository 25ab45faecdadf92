#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/point.hpp"
#include "roadscene/imaging/image.hpp"

namespace roadscene::imaging {

using geometry::Point2;

/// Ordered boundary pixels of one foreground component, in pixel coordinates
/// (x = column, y = row). Consecutive points are 8-neighbors; the last point
/// connects back to the first when `closed`.
struct Contour {
  std::vector<Point2> points;
  bool closed = false;
  std::size_t area = 0;  // pixels enclosed by the contour, holes included
};

namespace detail {

struct Pixel {
  long x = 0;
  long y = 0;
  friend bool operator==(Pixel, Pixel) = default;
};

// Moore neighborhood in clockwise order (y grows downwards), starting west.
inline constexpr std::array<Pixel, 8> kRing = {{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

inline int ring_index(Pixel delta) noexcept {
  for (int i = 0; i < 8; ++i) {
    if (kRing[static_cast<std::size_t>(i)] == delta) return i;
  }
  return -1;
}

/// 8-connected component labels (0 = background, components numbered from 1
/// in raster order of their first pixel).
inline std::vector<std::size_t> label_components(const BinaryMask& mask, std::size_t& count) {
  std::vector<std::size_t> labels(mask.bits.size(), 0);
  count = 0;
  std::queue<Pixel> queue;
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y) || labels[y * mask.width + x] != 0) continue;
      ++count;
      labels[y * mask.width + x] = count;
      queue.push({static_cast<long>(x), static_cast<long>(y)});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop();
        for (const Pixel d : kRing) {
          const Pixel q{p.x + d.x, p.y + d.y};
          if (!mask.get(q.x, q.y)) continue;
          auto& l = labels[static_cast<std::size_t>(q.y) * mask.width + static_cast<std::size_t>(q.x)];
          if (l == 0) {
            l = count;
            queue.push(q);
          }
        }
      }
    }
  }
  return labels;
}

/// Pixels enclosed by component `label`: its own pixels plus every pixel that
/// a 4-connected flood from outside its bounding box cannot reach.
inline std::size_t enclosed_area(const std::vector<std::size_t>& labels, std::size_t width, std::size_t label,
                                 long x0, long y0, long x1, long y1) {
  // Work on the bounding box grown by one pixel so the flood can go around.
  const long bw = x1 - x0 + 3;
  const long bh = y1 - y0 + 3;
  std::vector<char> seen(static_cast<std::size_t>(bw * bh), 0);
  auto blocked = [&](long bx, long by) {
    const long x = bx + x0 - 1;
    const long y = by + y0 - 1;
    if (x < x0 || x > x1 || y < y0 || y > y1) return false;
    return labels[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] == label;
  };
  std::queue<Pixel> queue;
  queue.push({0, 0});
  seen[0] = 1;
  std::size_t outside = 0;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop();
    ++outside;
    for (const Pixel d : {Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1}}) {
      const Pixel q{p.x + d.x, p.y + d.y};
      if (q.x < 0 || q.y < 0 || q.x >= bw || q.y >= bh) continue;
      auto& s = seen[static_cast<std::size_t>(q.y * bw + q.x)];
      if (s || blocked(q.x, q.y)) continue;
      s = 1;
      queue.push(q);
    }
  }
  return static_cast<std::size_t>(bw * bh) - outside;
}

/// Moore-neighbor tracing from `start` (the component's first pixel in raster
/// order, so its west neighbor is background) with Jacob's stopping criterion:
/// stop on re-entering the start pixel from the initial backtrack.
///
/// Thin components can cycle without ever re-entering the start that way (a
/// two-pixel blob enters it from the south). The walk is deterministic, so
/// reaching the state after the first move again closes the same cycle.
inline std::vector<Point2> moore_trace(const BinaryMask& mask, Pixel start) {
  auto as_point = [](Pixel q) { return Point2{static_cast<double>(q.x), static_cast<double>(q.y)}; };
  std::vector<Point2> points{as_point(start)};
  const Pixel start_back{start.x - 1, start.y};
  Pixel p = start;
  Pixel back = start_back;
  std::pair<Pixel, Pixel> first_move{};
  // Each boundary pixel is entered at most once per 8-neighbor.
  const std::size_t limit = 8 * mask.width * mask.height + 8;
  for (std::size_t step = 0; step < limit; ++step) {
    const int from = ring_index({back.x - p.x, back.y - p.y});
    bool moved = false;
    for (int k = 1; k <= 8; ++k) {
      const Pixel d = kRing[static_cast<std::size_t>((from + k) % 8)];
      const Pixel c{p.x + d.x, p.y + d.y};
      if (!mask.get(c.x, c.y)) continue;
      const Pixel prev = kRing[static_cast<std::size_t>((from + k - 1) % 8)];
      back = {p.x + prev.x, p.y + prev.y};
      p = c;
      moved = true;
      break;
    }
    if (!moved) return points;  // isolated pixel
    if (p == start && back == start_back) return points;
    if (step == 0) {
      first_move = {p, back};
    } else if (p == first_move.first && back == first_move.second) {
      if (points.size() > 1 && points.back() == as_point(start)) points.pop_back();
      return points;
    }
    points.push_back(as_point(p));
  }
  fail(ErrorCode::invalid_argument, "contour tracing did not terminate");
}

}  // namespace detail

/// Outer contours of all 8-connected foreground components, largest enclosed
/// area first (ties in raster order of the component's first pixel).
inline std::vector<Contour> trace_contour(const BinaryMask& mask) {
  std::size_t count = 0;
  const auto labels = detail::label_components(mask, count);
  if (count == 0) fail(ErrorCode::empty_mask, "mask has no foreground pixels");

  struct Box {
    long x0, y0, x1, y1;
    detail::Pixel first;
    bool seen = false;
  };
  std::vector<Box> boxes(count + 1);
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      const std::size_t l = labels[y * mask.width + x];
      if (l == 0) continue;
      auto& b = boxes[l];
      const long lx = static_cast<long>(x);
      const long ly = static_cast<long>(y);
      if (!b.seen) {
        b = {lx, ly, lx, ly, {lx, ly}, true};
      } else {
        b.x0 = std::min(b.x0, lx);
        b.x1 = std::max(b.x1, lx);
        b.y1 = std::max(b.y1, ly);
      }
    }
  }

  std::vector<Contour> contours;
  contours.reserve(count);
  for (std::size_t l = 1; l <= count; ++l) {
    const auto& b = boxes[l];
    Contour c;
    c.points = detail::moore_trace(mask, b.first);
    c.closed = c.points.size() >= 3;
    c.area = detail::enclosed_area(labels, mask.width, l, b.x0, b.y0, b.x1, b.y1);
    contours.push_back(std::move(c));
  }
  std::stable_sort(contours.begin(), contours.end(),
                   [](const Contour& a, const Contour& b) { return a.area > b.area; });
  return contours;
}

}  // namespace roadscene::imaging
