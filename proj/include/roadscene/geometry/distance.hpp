#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/spline.hpp"
#include "roadscene/signal.hpp"

namespace roadscene::geometry {

inline constexpr std::size_t kDefaultQuadratureSamples = 1024;
inline constexpr double kInfinityOrder = std::numeric_limits<double>::infinity();

struct CurveMetricParams {
  double p = 2.0;  // L_p order, >= 1, or kInfinityOrder
  std::size_t samples = kDefaultQuadratureSamples;

  void validate() const {
    if (std::isnan(p) || p < 1.0) fail(ErrorCode::invalid_order, "L_p order must be >= 1, got " + std::to_string(p));
    require(samples >= 2, ErrorCode::invalid_argument, "quadrature needs at least 2 samples");
  }
};

/// |y1(t_k) - y2(t_k)| on the uniform grid t_k = k / (samples - 1).
inline SampledSignal pointwise_distance_signal(const Spline2D& y1, const Spline2D& y2, std::size_t samples,
                                               std::string name = "d1") {
  auto grid = uniform_grid(samples);
  std::vector<double> values(samples);
  for (std::size_t k = 0; k < samples; ++k) values[k] = distance(y1.eval(grid[k]), y2.eval(grid[k]));
  return {std::move(name), std::move(grid), std::move(values)};
}

/// L_p norm of a uniformly sampled function on [0,1] by the trapezoid rule.
/// The trapezoid weights sum to one, so the result is monotone in p.
inline double lp_norm(const std::vector<double>& values, double p) {
  if (std::isinf(p)) {
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::abs(v));
    return sup;
  }
  const std::size_t n = values.size();
  const double h = 1.0 / static_cast<double>(n - 1);
  double integral = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = (k == 0 || k + 1 == n) ? 0.5 * h : h;
    integral += w * std::pow(std::abs(values[k]), p);
  }
  return std::pow(integral, 1.0 / p);
}

/// d_p(y1, y2) = (int_0^1 |y1(t) - y2(t)|^p dt)^(1/p); d_inf is the sup over samples.
inline double distance_lp(const Spline2D& y1, const Spline2D& y2, const CurveMetricParams& params = {}) {
  params.validate();
  const auto signal = pointwise_distance_signal(y1, y2, params.samples);
  return lp_norm(signal.values(), params.p);
}

inline double distance_inf(const Spline2D& y1, const Spline2D& y2,
                           std::size_t samples = kDefaultQuadratureSamples) {
  return distance_lp(y1, y2, {kInfinityOrder, samples});
}

}  // namespace roadscene::geometry
