#pragma once

// Reference curve evaluation by de Boor's triangular scheme on an explicitly
// built clamped knot vector, plus dense-sampling distance references.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

struct P {
  double x = 0.0, y = 0.0;
};

inline std::vector<double> clamped_uniform_knots(std::size_t n_ctrl) {
  const std::size_t segments = n_ctrl - 3;
  std::vector<double> knots(4, 0.0);
  for (std::size_t i = 1; i < segments; ++i) knots.push_back(static_cast<double>(i) / static_cast<double>(segments));
  knots.insert(knots.end(), 4, 1.0);
  return knots;
}

/// Cubic B-spline point at t by de Boor's algorithm.
inline P de_boor(const std::vector<P>& ctrl, double t) {
  const auto knots = clamped_uniform_knots(ctrl.size());
  const std::size_t n = ctrl.size();
  std::size_t k = 3;
  while (k + 1 < n && knots[k + 1] <= t) ++k;
  std::vector<P> d(4);
  for (std::size_t j = 0; j < 4; ++j) d[j] = ctrl[k - 3 + j];
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t j = 3; j >= r; --j) {
      const std::size_t i = k - 3 + j;
      const double denom = knots[i + 4 - r] - knots[i];
      const double alpha = denom == 0.0 ? 0.0 : (t - knots[i]) / denom;
      d[j] = {(1.0 - alpha) * d[j - 1].x + alpha * d[j].x, (1.0 - alpha) * d[j - 1].y + alpha * d[j].y};
    }
  }
  return d[3];
}

inline double separation(const std::vector<P>& a, const std::vector<P>& b, double t) {
  const P p = de_boor(a, t);
  const P q = de_boor(b, t);
  return std::hypot(p.x - q.x, p.y - q.y);
}

/// (integral of |a(t) - b(t)|^p dt)^(1/p) by the composite trapezoid rule.
inline double lp_distance(const std::vector<P>& a, const std::vector<P>& b, double p, std::size_t samples) {
  double acc = 0.0;
  const double h = 1.0 / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const double w = (k == 0 || k + 1 == samples) ? 0.5 * h : h;
    acc += w * std::pow(separation(a, b, static_cast<double>(k) * h), p);
  }
  return std::pow(acc, 1.0 / p);
}

inline double sup_distance(const std::vector<P>& a, const std::vector<P>& b, std::size_t samples) {
  double m = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    m = std::max(m, separation(a, b, static_cast<double>(k) / static_cast<double>(samples - 1)));
  }
  return m;
}

/// Distance from q to the polyline through pts.
inline double distance_to_polyline(P q, const std::vector<P>& pts) {
  double best = std::hypot(q.x - pts[0].x, q.y - pts[0].y);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const P a = pts[i - 1], b = pts[i];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double s = len2 == 0.0 ? 0.0 : ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::hypot(q.x - (a.x + s * dx), q.y - (a.y + s * dy)));
  }
  return best;
}

}  // namespace oracle
