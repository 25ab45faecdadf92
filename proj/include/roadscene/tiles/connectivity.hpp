#pragma once

#include <cstddef>
#include <queue>
#include <vector>
#include <utility>

#include "roadscene/imaging/image.hpp"

namespace roadscene::tiles {

/// True when the foreground of `mask` forms one 4-connected component.
/// An empty mask is not connected.
inline bool is_4_connected(const imaging::BinaryMask& mask) {
  const std::size_t total = mask.count();
  if (total == 0) return false;
  std::vector<char> seen(mask.bits.size(), 0);
  std::queue<std::pair<long, long>> queue;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (mask.bits[i]) {
      seen[i] = 1;
      queue.emplace(static_cast<long>(i % mask.width), static_cast<long>(i / mask.width));
      break;
    }
  }
  std::size_t reached = 0;
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop();
    ++reached;
    for (const auto& [dx, dy] : {std::pair{1L, 0L}, std::pair{-1L, 0L}, std::pair{0L, 1L}, std::pair{0L, -1L}}) {
      const long nx = x + dx;
      const long ny = y + dy;
      if (!mask.get(nx, ny)) continue;
      auto& s = seen[static_cast<std::size_t>(ny) * mask.width + static_cast<std::size_t>(nx)];
      if (s) continue;
      s = 1;
      queue.emplace(nx, ny);
    }
  }
  return reached == total;
}

}  // namespace roadscene::tiles
