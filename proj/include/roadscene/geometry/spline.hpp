#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/point.hpp"

namespace roadscene::geometry {

inline constexpr int kSplineDegree = 3;
inline constexpr std::size_t kMinControlPoints = 4;

/// Clamped cubic B-spline knot vector with uniform interior knots over [0,1].
///
/// For n control points the vector has n + 4 entries: four zeros, the
/// interior knots k / (n - 3) for k = 1 .. n - 4, and four ones. Curves built
/// on it interpolate their first and last control points.
class ClampedKnots {
 public:
  explicit ClampedKnots(std::size_t n_ctrl) : n_(n_ctrl) {
    require(n_ctrl >= kMinControlPoints, ErrorCode::too_few_points,
            "a cubic spline needs at least 4 control points, got " + std::to_string(n_ctrl));
  }

  std::size_t control_count() const noexcept { return n_; }
  std::size_t span_count() const noexcept { return n_ - 3; }

  double operator[](std::size_t i) const noexcept {
    if (i <= 3) return 0.0;
    if (i >= n_) return 1.0;
    return static_cast<double>(i - 3) / static_cast<double>(n_ - 3);
  }

  /// Index s with knot[s] <= t < knot[s+1]; t == 1 maps to the last span.
  std::size_t span(double t) const noexcept {
    const std::size_t last = n_ - 1;
    auto s = static_cast<std::size_t>(3.0 + std::floor(t * static_cast<double>(n_ - 3)));
    s = std::clamp<std::size_t>(s, 3, last);
    while (s > 3 && t < (*this)[s]) --s;
    while (s < last && t >= (*this)[s + 1]) ++s;
    return s;
  }

  /// Nonzero basis functions of `degree` on span s, evaluated at t.
  /// Entry r belongs to control point s - degree + r.
  template <int Degree>
  std::array<double, Degree + 1> basis(std::size_t s, double t) const noexcept {
    std::array<double, Degree + 1> n{};
    std::array<double, Degree + 1> left{};
    std::array<double, Degree + 1> right{};
    n[0] = 1.0;
    for (int j = 1; j <= Degree; ++j) {
      left[j] = t - (*this)[s + 1 - j];
      right[j] = (*this)[s + j] - t;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double denom = right[r + 1] + left[j - r];
        const double temp = denom == 0.0 ? 0.0 : n[r] / denom;
        n[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      n[j] = saved;
    }
    return n;
  }

  /// First derivatives of the four cubic basis functions on span s.
  std::array<double, 4> basis_derivative(std::size_t s, double t) const noexcept {
    const auto quad = basis<2>(s, t);  // N_{s-2,2} .. N_{s,2}
    auto n2 = [&](std::ptrdiff_t k) {
      const std::ptrdiff_t r = k - (static_cast<std::ptrdiff_t>(s) - 2);
      return (r < 0 || r > 2) ? 0.0 : quad[static_cast<std::size_t>(r)];
    };
    std::array<double, 4> d{};
    for (int j = 0; j < 4; ++j) {
      const auto k = static_cast<std::ptrdiff_t>(s) - 3 + j;
      const auto uk = static_cast<std::size_t>(k);
      const double a = (*this)[uk + 3] - (*this)[uk];
      const double b = (*this)[uk + 4] - (*this)[uk + 1];
      d[static_cast<std::size_t>(j)] = (a == 0.0 ? 0.0 : 3.0 * n2(k) / a) - (b == 0.0 ? 0.0 : 3.0 * n2(k + 1) / b);
    }
    return d;
  }

 private:
  std::size_t n_;
};

/// Parametric planar curve: a clamped cubic B-spline on the parameter domain [0,1].
class Spline2D {
 public:
  explicit Spline2D(std::vector<Point2> control_points, bool closed = false)
      : ctrl_(std::move(control_points)), closed_(closed) {
    require(ctrl_.size() >= kMinControlPoints, ErrorCode::too_few_points,
            "a cubic spline needs at least 4 control points, got " + std::to_string(ctrl_.size()));
    for (const auto& p : ctrl_) {
      require(is_finite(p), ErrorCode::invalid_argument, "control points must be finite");
    }
  }

  std::span<const Point2> control_points() const noexcept { return ctrl_; }
  std::size_t size() const noexcept { return ctrl_.size(); }
  bool closed() const noexcept { return closed_; }
  ClampedKnots knots() const { return ClampedKnots(ctrl_.size()); }

  Point2 eval(double t) const {
    check_domain(t);
    const ClampedKnots knots(ctrl_.size());
    const std::size_t s = knots.span(t);
    const auto n = knots.basis<kSplineDegree>(s, t);
    Point2 p;
    for (std::size_t r = 0; r < 4; ++r) p += n[r] * ctrl_[s - 3 + r];
    return p;
  }

  Point2 derivative(double t) const {
    check_domain(t);
    const ClampedKnots knots(ctrl_.size());
    const std::size_t s = knots.span(t);
    const auto d = knots.basis_derivative(s, t);
    Point2 p;
    for (std::size_t r = 0; r < 4; ++r) p += d[r] * ctrl_[s - 3 + r];
    return p;
  }

  Point2 front() const noexcept { return ctrl_.front(); }
  Point2 back() const noexcept { return ctrl_.back(); }

  /// Same curve traversed backwards: reverse(t) == this(1 - t).
  Spline2D reversed() const { return Spline2D(std::vector<Point2>(ctrl_.rbegin(), ctrl_.rend()), closed_); }

  /// Image of the curve under p -> scale * p + offset. Exact for B-splines.
  Spline2D transformed(double scale, Point2 offset) const {
    std::vector<Point2> out;
    out.reserve(ctrl_.size());
    for (const auto& p : ctrl_) out.push_back(scale * p + offset);
    return Spline2D(std::move(out), closed_);
  }

  std::vector<Point2> sample(std::size_t count) const {
    require(count >= 2, ErrorCode::invalid_argument, "sampling needs at least 2 points");
    std::vector<Point2> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back(eval(static_cast<double>(k) / static_cast<double>(count - 1)));
    }
    return out;
  }

  friend bool operator==(const Spline2D&, const Spline2D&) = default;

 private:
  static void check_domain(double t) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::domain_error, "parameter " + std::to_string(t) + " outside [0,1]");
  }

  std::vector<Point2> ctrl_;
  bool closed_ = false;
};

/// Polyline length of the curve sampled at `samples` uniform parameters.
inline double approximate_length(const Spline2D& spline, std::size_t samples = 1024) {
  const auto pts = spline.sample(samples);
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

}  // namespace roadscene::geometry
