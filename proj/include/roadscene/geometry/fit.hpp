#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/point.hpp"
#include "roadscene/geometry/spline.hpp"

namespace roadscene::geometry {

struct FitResult {
  Spline2D spline;
  std::vector<double> parameters;  // parameter assigned to each input point
  double max_residual = 0.0;       // max_i |spline(u_i) - p_i|
  double rms_residual = 0.0;
};

/// Normalized cumulative chord length of an ordered point list.
inline std::vector<double> chord_length_parameters(std::span<const Point2> points) {
  std::vector<double> u(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) u[i] = u[i - 1] + distance(points[i - 1], points[i]);
  const double total = u.empty() ? 0.0 : u.back();
  if (!(total > 0.0)) fail(ErrorCode::degenerate_input, "all points coincide");
  for (auto& v : u) v /= total;
  u.back() = 1.0;
  return u;
}

/// Least-squares clamped cubic fit with caller-supplied parameters in [0,1].
///
/// Minimizes sum_i |S(u_i) - p_i|^2 over the n_ctrl control points. A point
/// set that already lies on a spline with n_ctrl control points, sampled at
/// its own parameters, is reproduced to round-off.
inline FitResult fit_spline_at(std::span<const Point2> points, std::span<const double> parameters,
                               std::size_t n_ctrl, bool closed = false) {
  require(n_ctrl >= kMinControlPoints, ErrorCode::too_few_points,
          "n_ctrl must be at least 4, got " + std::to_string(n_ctrl));
  if (points.size() < n_ctrl) {
    fail(ErrorCode::too_few_points,
         std::to_string(points.size()) + " points cannot determine " + std::to_string(n_ctrl) + " control points");
  }
  require(parameters.size() == points.size(), ErrorCode::invalid_argument, "one parameter per point required");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(is_finite(points[i]), ErrorCode::invalid_argument, "input points must be finite");
    require(parameters[i] >= 0.0 && parameters[i] <= 1.0, ErrorCode::domain_error, "fit parameters must lie in [0,1]");
  }
  const bool all_same = std::all_of(points.begin(), points.end(), [&](Point2 p) { return p == points.front(); });
  if (all_same) fail(ErrorCode::degenerate_input, "all points coincide");

  const ClampedKnots knots(n_ctrl);
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(n_ctrl));
  Eigen::MatrixXd rhs(m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = parameters[static_cast<std::size_t>(i)];
    const std::size_t s = knots.span(t);
    const auto n = knots.basis<kSplineDegree>(s, t);
    for (std::size_t r = 0; r < 4; ++r) basis(i, static_cast<Eigen::Index>(s - 3 + r)) = n[r];
    rhs(i, 0) = points[static_cast<std::size_t>(i)].x;
    rhs(i, 1) = points[static_cast<std::size_t>(i)].y;
  }

  // Minimum-norm solution keeps the fit defined when a span carries no data.
  const Eigen::MatrixXd ctrl = basis.completeOrthogonalDecomposition().solve(rhs);

  std::vector<Point2> control(n_ctrl);
  for (std::size_t j = 0; j < n_ctrl; ++j) {
    control[j] = {ctrl(static_cast<Eigen::Index>(j), 0), ctrl(static_cast<Eigen::Index>(j), 1)};
  }
  FitResult result{Spline2D(std::move(control), closed), {parameters.begin(), parameters.end()}, 0.0, 0.0};
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = distance(result.spline.eval(parameters[i]), points[i]);
    result.max_residual = std::max(result.max_residual, r);
    sum_sq += r * r;
  }
  result.rms_residual = std::sqrt(sum_sq / static_cast<double>(points.size()));
  return result;
}

/// Least-squares clamped cubic fit under chord-length parameterization.
inline FitResult fit_spline(std::span<const Point2> points, std::size_t n_ctrl, bool closed = false) {
  require(n_ctrl >= kMinControlPoints, ErrorCode::too_few_points,
          "n_ctrl must be at least 4, got " + std::to_string(n_ctrl));
  if (points.size() < n_ctrl) {
    fail(ErrorCode::too_few_points,
         std::to_string(points.size()) + " points cannot determine " + std::to_string(n_ctrl) + " control points");
  }
  const auto u = chord_length_parameters(points);
  return fit_spline_at(points, u, n_ctrl, closed);
}

}  // namespace roadscene::geometry
