#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/imaging/image.hpp"
#include "roadscene/io.hpp"

namespace roadscene::tiles {

using imaging::BinaryMask;

/// Neighbor bits of a road tile code.
enum Direction : int { north = 1, east = 2, south = 4, west = 8 };

inline constexpr int kEmpty = -1;
inline constexpr int kMaxCode = 15;

/// Row-major grid of tile codes: kEmpty, or a 4-bit neighbor mask in [0, 15].
struct TileGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<int> cells;

  TileGrid() = default;
  TileGrid(std::size_t w, std::size_t h) : width(w), height(h), cells(w * h, kEmpty) {
    require(w > 0 && h > 0, ErrorCode::invalid_argument, "tile grid dimensions must be positive");
  }

  int at(std::size_t x, std::size_t y) const { return cells[y * width + x]; }
  int& at(std::size_t x, std::size_t y) { return cells[y * width + x]; }

  std::size_t road_count() const noexcept {
    std::size_t n = 0;
    for (int c : cells) n += c != kEmpty;
    return n;
  }

  friend bool operator==(const TileGrid&, const TileGrid&) = default;
};

/// 4-neighbor code of road cell (x, y): N=1, E=2, S=4, W=8 set when that
/// neighbor is road. Out-of-bounds neighbors are not road.
inline int code_neighborhood(const BinaryMask& mask, std::size_t x, std::size_t y) {
  require(x < mask.width && y < mask.height, ErrorCode::invalid_argument, "cell index out of bounds");
  if (!mask.at(x, y)) {
    fail(ErrorCode::not_road_cell, "cell (" + std::to_string(x) + ", " + std::to_string(y) + ") is not road");
  }
  const long lx = static_cast<long>(x);
  const long ly = static_cast<long>(y);
  int code = 0;
  if (mask.get(lx, ly - 1)) code |= north;
  if (mask.get(lx + 1, ly)) code |= east;
  if (mask.get(lx, ly + 1)) code |= south;
  if (mask.get(lx - 1, ly)) code |= west;
  return code;
}

inline TileGrid synthesize(const BinaryMask& mask) {
  TileGrid grid(mask.width, mask.height);
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) grid.at(x, y) = code_neighborhood(mask, x, y);
    }
  }
  return grid;
}

inline BinaryMask road_mask(const TileGrid& grid) {
  BinaryMask mask(grid.width, grid.height);
  for (std::size_t i = 0; i < grid.cells.size(); ++i) mask.bits[i] = grid.cells[i] != kEmpty;
  return mask;
}

// { "width": W, "height": H, "cells": [codes...] }, kEmpty written as -1.
inline io::Json to_json(const TileGrid& grid) {
  return {{"width", grid.width}, {"height", grid.height}, {"cells", grid.cells}};
}

inline TileGrid tile_grid_from_json(const io::Json& j) {
  try {
    const auto w = j.at("width").get<std::size_t>();
    const auto h = j.at("height").get<std::size_t>();
    TileGrid grid(w, h);
    const auto& cells = j.at("cells");
    require(cells.is_array() && cells.size() == w * h, ErrorCode::invalid_argument,
            "cells must hold width * height entries");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const int c = cells[i].get<int>();
      require(c == kEmpty || (c >= 0 && c <= kMaxCode), ErrorCode::invalid_argument,
              "tile code " + std::to_string(c) + " out of range");
      grid.cells[i] = c;
    }
    return grid;
  } catch (const io::Json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("bad tile grid JSON: ") + e.what());
  }
}

inline TileGrid load_tile_grid(const std::filesystem::path& path) { return tile_grid_from_json(io::read_json(path)); }

inline void save_tile_grid(const std::filesystem::path& path, const TileGrid& grid) {
  io::write_json(path, to_json(grid));
}

}  // namespace roadscene::tiles
