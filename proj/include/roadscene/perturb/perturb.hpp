#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/geometry/distance.hpp"
#include "roadscene/geometry/fit.hpp"
#include "roadscene/geometry/spline.hpp"
#include "roadscene/signal.hpp"
#include "roadscene/stl/formula.hpp"
#include "roadscene/stl/trace.hpp"

namespace roadscene::perturb {

using geometry::Point2;
using geometry::Spline2D;

/// STL time spanned by the spline parameter [0, 1].
inline constexpr double kDefaultHorizon = 10.0;
inline constexpr std::size_t kDefaultSamples = 256;

enum class OffsetDirection { normal, fixed_y };

inline const char* to_string(OffsetDirection d) noexcept { return d == OffsetDirection::normal ? "normal" : "fixed_y"; }

struct SinusoidTerm {
  double amplitude = 0.0;          // pixels
  double angular_frequency = 0.0;  // radians per unit spline parameter
  double phase = 0.0;              // radians

  friend bool operator==(const SinusoidTerm&, const SinusoidTerm&) = default;
};

struct SinusoidParams {
  std::vector<SinusoidTerm> terms;
  OffsetDirection direction = OffsetDirection::normal;
  double amplitude_max = 0.0;  // bound the amplitudes were drawn under

  void validate() const {
    require(!terms.empty(), ErrorCode::invalid_argument, "at least one sinusoid term is required");
    for (const auto& t : terms) {
      require(std::isfinite(t.amplitude) && t.amplitude >= 0.0, ErrorCode::invalid_argument,
              "sinusoid amplitudes must be finite and nonnegative");
      require(std::isfinite(t.angular_frequency) && std::isfinite(t.phase), ErrorCode::invalid_argument,
              "sinusoid frequency and phase must be finite");
    }
    require(std::isfinite(amplitude_max) && amplitude_max >= 0.0, ErrorCode::invalid_argument,
            "amplitude bound must be nonnegative");
  }

  /// e(t) = sum_i A_i sin(w_i t + phi_i)
  double offset(double t) const noexcept {
    double e = 0.0;
    for (const auto& term : terms) e += term.amplitude * std::sin(term.angular_frequency * t + term.phase);
    return e;
  }

  friend bool operator==(const SinusoidParams&, const SinusoidParams&) = default;
};

struct PerturbedSpline {
  Spline2D spline;
  SampledSignal e1;  // |e(t_k)| on the STL time grid
  double fit_residual = 0.0;
};

/// Pointwise perturbation magnitude e1 and base-to-variant distance d1 on one grid.
struct PerturbationTrace {
  SampledSignal e1;
  SampledSignal d1;

  stl::Trace to_trace() const { return stl::Trace({e1, d1}); }
};

namespace detail {

inline Point2 unit_normal(const Spline2D& base, const std::vector<Point2>& pts, std::size_t k, double t) {
  Point2 d = base.derivative(t);
  if (geometry::norm(d) < 1e-12) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 < pts.size() ? k + 1 : k;
    d = pts[b] - pts[a];
  }
  const double len = geometry::norm(d);
  if (len < 1e-12) return {0.0, 1.0};
  return {-d.y / len, d.x / len};
}

}  // namespace detail

/// Offsets `samples` points of the base curve by e(t_k) along the chosen
/// direction and refits a spline with the base's control-point count at the
/// same parameters t_k = k / (samples - 1).
inline PerturbedSpline perturb_spline(const Spline2D& base, const SinusoidParams& params,
                                      std::size_t samples = kDefaultSamples, double horizon = kDefaultHorizon) {
  params.validate();
  require(samples >= 4, ErrorCode::invalid_argument, "perturbation needs at least 4 samples");
  require(std::isfinite(horizon) && horizon > 0.0, ErrorCode::invalid_argument, "horizon must be positive");
  const auto grid = uniform_grid(samples);
  const auto base_pts = base.sample(samples);
  std::vector<Point2> moved(samples);
  std::vector<double> magnitude(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double e = params.offset(grid[k]);
    const Point2 dir = params.direction == OffsetDirection::fixed_y ? Point2{0.0, 1.0}
                                                                    : detail::unit_normal(base, base_pts, k, grid[k]);
    moved[k] = base_pts[k] + e * dir;
    magnitude[k] = std::abs(e);
  }
  auto fit = geometry::fit_spline_at(moved, grid, base.size(), base.closed());
  return {std::move(fit.spline), SampledSignal("e1", uniform_grid(samples, horizon), std::move(magnitude)),
          fit.max_residual};
}

/// Packs e1 with d1 = |base(t_k) - variant(t_k)| on e1's grid.
inline PerturbationTrace build_trace(const Spline2D& base, const Spline2D& variant, const SampledSignal& e1) {
  require(e1.size() >= 2, ErrorCode::invalid_argument, "e1 needs at least 2 samples");
  auto d1 = geometry::pointwise_distance_signal(base, variant, e1.size(), "d1").retimed(e1.timestamps());
  return {e1.renamed("e1"), std::move(d1)};
}

/// d_inf between base and variant.
inline double max_deviation(const Spline2D& base, const Spline2D& variant,
                            std::size_t samples = geometry::kDefaultQuadratureSamples) {
  return geometry::distance_inf(base, variant, samples);
}

/// The three road specifications: bounded perturbation, bounded distance, and
/// recovery within [t1, t2] after an excursion.
inline std::string phi1(double threshold = 10.0) {
  return "G(e1 < " + stl::detail::format_number(threshold) + ")";
}
inline std::string phi2(double threshold = 10.0) {
  return "G(d1 < " + stl::detail::format_number(threshold) + ")";
}
inline std::string phi3(double t1, double t2, double threshold = 10.0) {
  const std::string c = stl::detail::format_number(threshold);
  return "G((e1 > " + c + ") -> F[" + stl::detail::format_number(t1) + "," + stl::detail::format_number(t2) +
         "](G(d1 < " + c + " & e1 < " + c + ")))";
}

}  // namespace roadscene::perturb
