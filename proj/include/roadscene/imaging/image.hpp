#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "roadscene/error.hpp"

namespace roadscene::imaging {

/// Row-major 8-bit grayscale image.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {
    require(w > 0 && h > 0, ErrorCode::invalid_argument, "image dimensions must be positive");
  }
  GrayImage(std::size_t w, std::size_t h, std::vector<std::uint8_t> data) : width(w), height(h), pixels(std::move(data)) {
    require(w > 0 && h > 0, ErrorCode::invalid_argument, "image dimensions must be positive");
    require(pixels.size() == w * h, ErrorCode::invalid_argument, "pixel buffer does not match dimensions");
  }

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Row-major foreground mask; 1 marks road.
struct BinaryMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(std::size_t w, std::size_t h, bool fill = false) : width(w), height(h), bits(w * h, fill ? 1 : 0) {
    require(w > 0 && h > 0, ErrorCode::invalid_argument, "mask dimensions must be positive");
  }

  bool in_bounds(long x, long y) const noexcept {
    return x >= 0 && y >= 0 && static_cast<std::size_t>(x) < width && static_cast<std::size_t>(y) < height;
  }
  bool at(std::size_t x, std::size_t y) const { return bits[y * width + x] != 0; }
  void set(std::size_t x, std::size_t y, bool v = true) { bits[y * width + x] = v ? 1 : 0; }
  /// Out-of-bounds reads as background.
  bool get(long x, long y) const noexcept {
    return in_bounds(x, y) && bits[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] != 0;
  }
  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

}  // namespace roadscene::imaging
