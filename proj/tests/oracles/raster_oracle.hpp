#pragma once

// Pixel-grid references: component labeling, exterior flood fill, direct
// Gaussian convolution and 4-connectivity, all over plain byte vectors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

namespace oracle {

struct Grid {
  std::size_t w = 0, h = 0;
  std::vector<std::uint8_t> on;  // row-major

  bool get(long x, long y) const {
    return x >= 0 && y >= 0 && x < static_cast<long>(w) && y < static_cast<long>(h) && on[y * w + x];
  }
};

/// Pixels of the 8-connected component containing (sx, sy).
inline std::vector<std::uint8_t> component_of(const Grid& g, long sx, long sy) {
  std::vector<std::uint8_t> out(g.w * g.h, 0);
  std::queue<std::pair<long, long>> q;
  q.emplace(sx, sy);
  out[sy * g.w + sx] = 1;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const long nx = x + dx, ny = y + dy;
        if (!g.get(nx, ny) || out[ny * g.w + nx]) continue;
        out[ny * g.w + nx] = 1;
        q.emplace(nx, ny);
      }
    }
  }
  return out;
}

/// Everything not reachable from outside the image by 4-steps through
/// non-wall pixels.
inline std::vector<std::uint8_t> enclosed_by(const std::vector<std::uint8_t>& wall, std::size_t w, std::size_t h) {
  // pad by one so the outside is connected
  const long pw = static_cast<long>(w) + 2, ph = static_cast<long>(h) + 2;
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(pw * ph), 0);
  auto is_wall = [&](long x, long y) {
    return x >= 1 && y >= 1 && x <= static_cast<long>(w) && y <= static_cast<long>(h) && wall[(y - 1) * w + (x - 1)];
  };
  std::queue<std::pair<long, long>> q;
  q.emplace(0, 0);
  outside[0] = 1;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    const long nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= pw || n[1] >= ph) continue;
      auto& o = outside[n[1] * pw + n[0]];
      if (o || is_wall(n[0], n[1])) continue;
      o = 1;
      q.emplace(n[0], n[1]);
    }
  }
  std::vector<std::uint8_t> inside(w * h, 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) inside[y * w + x] = !outside[(y + 1) * pw + (x + 1)];
  }
  return inside;
}

/// Normalized 2D Gaussian over the (2r+1)^2 square, r = ceil(3 sigma).
inline std::vector<std::vector<double>> gaussian_2d(double sigma) {
  const long r = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<std::vector<double>> k(2 * r + 1, std::vector<double>(2 * r + 1));
  double sum = 0.0;
  for (long y = -r; y <= r; ++y) {
    for (long x = -r; x <= r; ++x) {
      sum += k[y + r][x + r] = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
    }
  }
  for (auto& row : k) {
    for (auto& v : row) v /= sum;
  }
  return k;
}

inline bool four_connected(const Grid& g) {
  std::size_t total = 0, start = g.on.size();
  for (std::size_t i = 0; i < g.on.size(); ++i) {
    if (g.on[i]) {
      ++total;
      if (start == g.on.size()) start = i;
    }
  }
  if (total == 0) return false;
  std::vector<std::uint8_t> seen(g.on.size(), 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    ++reached;
    const long x = static_cast<long>(i % g.w), y = static_cast<long>(i / g.w);
    const long nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
    for (const auto& n : nb) {
      if (!g.get(n[0], n[1])) continue;
      const std::size_t j = n[1] * g.w + n[0];
      if (!seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return reached == total;
}

}  // namespace oracle
