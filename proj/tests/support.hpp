#pragma once

// Fixtures shared by the test binaries: synthetic images, random curves and
// scratch directories.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles/geometry_oracle.hpp"
#include "roadscene/geometry/fit.hpp"
#include "roadscene/geometry/spline.hpp"
#include "roadscene/imaging/image.hpp"

namespace testing_support {

using roadscene::geometry::Point2;
using roadscene::geometry::Spline2D;

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("roadscene-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<oracle::P> to_oracle(const Spline2D& s) {
  std::vector<oracle::P> out;
  for (const auto& p : s.control_points()) out.push_back({p.x, p.y});
  return out;
}

/// Control polygon of a gently turning path: equal legs, heading changes
/// bounded by `max_turn` radians per leg.
inline std::vector<Point2> turning_polygon(std::mt19937_64& rng, std::size_t n, double leg, double max_turn) {
  std::uniform_real_distribution<double> heading0(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> turn(-max_turn, max_turn);
  std::vector<Point2> pts{{0.0, 0.0}};
  double h = heading0(rng);
  for (std::size_t i = 1; i < n; ++i) {
    h += turn(rng);
    pts.push_back(pts.back() + Point2{leg * std::cos(h), leg * std::sin(h)});
  }
  return pts;
}

/// Smooth curve with bounded curvature whose parameter is close to
/// proportional to arc length (refit under chord-length parameterization).
inline Spline2D random_smooth_spline(std::mt19937_64& rng, std::size_t n_ctrl = 7) {
  const Spline2D raw(turning_polygon(rng, n_ctrl, 20.0, 0.6));
  return roadscene::geometry::fit_spline(raw.sample(400), n_ctrl).spline;
}

/// Arbitrary spline with control points in a box.
inline Spline2D random_spline(std::mt19937_64& rng, std::size_t n_ctrl, double extent = 50.0) {
  std::uniform_real_distribution<double> c(-extent, extent);
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n_ctrl; ++i) pts.push_back({c(rng), c(rng)});
  return Spline2D(pts);
}

inline Spline2D straight(Point2 a, Point2 b, std::size_t n_ctrl = 4) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n_ctrl; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n_ctrl - 1);
    pts.push_back(a + s * (b - a));
  }
  return Spline2D(pts);
}

/// White axis-aligned rectangle [x0, x0+w) x [y0, y0+h) on black.
inline roadscene::imaging::GrayImage bar_image(std::size_t width, std::size_t height, std::size_t x0, std::size_t y0,
                                               std::size_t w, std::size_t h) {
  roadscene::imaging::GrayImage img(width, height, 0);
  for (std::size_t y = y0; y < y0 + h; ++y) {
    for (std::size_t x = x0; x < x0 + w; ++x) img.at(x, y) = 255;
  }
  return img;
}

/// White band of half-width `halfwidth` around a curve, on black.
inline roadscene::imaging::GrayImage road_image(std::size_t width, std::size_t height, const Spline2D& centerline,
                                                double halfwidth) {
  std::vector<oracle::P> poly;
  for (const auto& p : centerline.sample(2000)) poly.push_back({p.x, p.y});
  roadscene::imaging::GrayImage img(width, height, 0);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double d = oracle::distance_to_polyline({static_cast<double>(x), static_cast<double>(y)}, poly);
      if (d <= halfwidth) img.at(x, y) = 255;
    }
  }
  return img;
}

/// Gently curving road centerline inside a 160x120 frame.
inline Spline2D sample_road() {
  return Spline2D({{12.0, 90.0}, {40.0, 95.0}, {70.0, 40.0}, {105.0, 30.0}, {130.0, 55.0}, {148.0, 60.0}});
}

}  // namespace testing_support
