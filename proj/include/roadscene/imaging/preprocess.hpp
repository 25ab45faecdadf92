#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/imaging/image.hpp"

namespace roadscene::imaging {

struct PreprocessParams {
  double brightness_offset = 0.0;  // added intensity
  double contrast_gain = 1.0;      // about mid-gray 128, > 0
  double sharpness_amount = 0.0;   // unsharp-mask weight, >= 0
  double blur_sigma = 0.0;         // Gaussian std-dev in pixels, >= 0
  int threshold = 128;             // 0..255

  void validate() const {
    require(std::isfinite(brightness_offset), ErrorCode::invalid_argument, "brightness offset must be finite");
    require(std::isfinite(contrast_gain) && contrast_gain > 0.0, ErrorCode::invalid_argument,
            "contrast gain must be positive");
    require(std::isfinite(sharpness_amount) && sharpness_amount >= 0.0, ErrorCode::invalid_argument,
            "sharpness amount must be nonnegative");
    require(std::isfinite(blur_sigma) && blur_sigma >= 0.0, ErrorCode::invalid_argument,
            "blur sigma must be nonnegative");
    require(threshold >= 0 && threshold <= 255, ErrorCode::invalid_argument, "threshold must be in 0..255");
  }
};

namespace detail {

inline std::uint8_t to_pixel(double v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Mirror without repeating the edge sample: -1 -> 1, n -> n - 2.
inline std::size_t reflect(long i, std::size_t n) noexcept {
  if (n == 1) return 0;
  const long period = 2 * (static_cast<long>(n) - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<long>(n) ? i : period - i);
}

}  // namespace detail

/// Normalized 1-D Gaussian truncated at radius ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  require(sigma > 0.0, ErrorCode::invalid_argument, "Gaussian sigma must be positive");
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

/// Separable Gaussian blur with reflected borders; unrounded result.
inline std::vector<double> gaussian_blur(const GrayImage& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const long r = static_cast<long>(k.size() / 2);
  const std::size_t w = img.width;
  const std::size_t h = img.height;
  std::vector<double> tmp(w * h);
  std::vector<double> out(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long i = -r; i <= r; ++i) {
        acc += k[static_cast<std::size_t>(i + r)] * img.at(detail::reflect(static_cast<long>(x) + i, w), y);
      }
      tmp[y * w + x] = acc;
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long i = -r; i <= r; ++i) {
        acc += k[static_cast<std::size_t>(i + r)] * tmp[detail::reflect(static_cast<long>(y) + i, h) * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

/// contrast -> brightness -> unsharp mask (sigma 1) -> Gaussian blur; each
/// stage rounds and clamps to [0, 255]. Identity parameters return the input.
inline GrayImage preprocess(const GrayImage& img, const PreprocessParams& params) {
  params.validate();
  GrayImage out = img;
  if (params.contrast_gain != 1.0) {
    for (auto& p : out.pixels) p = detail::to_pixel(128.0 + params.contrast_gain * (p - 128.0));
  }
  if (params.brightness_offset != 0.0) {
    for (auto& p : out.pixels) p = detail::to_pixel(p + params.brightness_offset);
  }
  if (params.sharpness_amount > 0.0) {
    const auto soft = gaussian_blur(out, 1.0);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
      const double p = out.pixels[i];
      out.pixels[i] = detail::to_pixel(p + params.sharpness_amount * (p - soft[i]));
    }
  }
  if (params.blur_sigma > 0.0) {
    const auto blurred = gaussian_blur(out, params.blur_sigma);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = detail::to_pixel(blurred[i]);
  }
  return out;
}

/// Foreground where intensity >= level.
inline BinaryMask threshold(const GrayImage& img, int level) {
  require(level >= 0 && level <= 255, ErrorCode::invalid_argument, "threshold level must be in 0..255");
  BinaryMask mask(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] >= level ? 1 : 0;
  return mask;
}

}  // namespace roadscene::imaging
