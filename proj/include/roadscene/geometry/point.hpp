#pragma once

#include <cmath>
#include <vector>

namespace roadscene::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr Point2 operator*(Point2 p, double s) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) noexcept = default;

  Point2& operator+=(Point2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
};

inline double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 p) noexcept { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }
inline bool is_finite(Point2 p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

// Distance from p to the closed segment [a, b].
inline double distance_to_segment(Point2 p, Point2 a, Point2 b) noexcept {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  double s = dot(p - a, ab) / len2;
  s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
  return distance(p, a + s * ab);
}

using Polyline = std::vector<Point2>;

}  // namespace roadscene::geometry
