#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/perturb/perturb.hpp"
#include "roadscene/stl/formula.hpp"
#include "roadscene/stl/monitor.hpp"

namespace roadscene::perturb {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  void validate(const char* what) const {
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, ErrorCode::invalid_argument,
            std::string(what) + " range must be finite with lo <= hi");
  }
};

/// Uniform sampling box for sinusoid parameters.
struct SinusoidRanges {
  Range amplitude{0.0, 5.0};
  Range angular_frequency{2.0 * std::numbers::pi, 4.0 * std::numbers::pi};
  Range phase{0.0, 2.0 * std::numbers::pi};
  std::size_t terms = 1;
  OffsetDirection direction = OffsetDirection::normal;

  void validate() const {
    amplitude.validate("amplitude");
    angular_frequency.validate("angular frequency");
    phase.validate("phase");
    require(amplitude.lo >= 0.0, ErrorCode::invalid_argument, "amplitudes must be nonnegative");
    require(terms >= 1, ErrorCode::invalid_argument, "at least one sinusoid term is required");
  }
};

/// What d1 measures the candidate against.
enum class DistanceReference {
  base,              // the unperturbed road
  previous_variant,  // the last accepted variant, or the base before any
};

struct GenerateOptions {
  std::size_t n = 1;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 100;
  std::size_t samples = kDefaultSamples;
  double horizon = kDefaultHorizon;
  DistanceReference reference = DistanceReference::base;
};

struct Variant {
  Spline2D spline;
  PerturbationTrace trace;
  stl::Verdict verdict;
  SinusoidParams params;
  std::size_t attempt = 0;
};

struct VariantBatch {
  Spline2D base;
  std::vector<Variant> accepted;
  std::size_t rejected_count = 0;
  std::size_t attempts = 0;
  std::uint64_t seed = 0;

  double acceptance_rate() const noexcept {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted.size()) / static_cast<double>(attempts);
  }
};

class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(VariantBatch batch, std::size_t requested)
      : Error(ErrorCode::budget_exhausted,
              std::to_string(batch.accepted.size()) + " of " + std::to_string(requested) + " variants accepted in " +
                  std::to_string(batch.attempts) + " attempts (acceptance rate " +
                  std::to_string(batch.acceptance_rate()) + ")"),
        batch_(std::move(batch)) {}

  const VariantBatch& batch() const noexcept { return batch_; }

 private:
  VariantBatch batch_;
};

/// SplitMix64 finalizer; decorrelates (seed, attempt) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for one attempt, identical on every platform.
class AttemptRng {
 public:
  AttemptRng(std::uint64_t seed, std::uint64_t attempt) : engine_(mix64(seed ^ mix64(attempt))) {}

  double uniform(const Range& r) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return r.lo + (r.hi - r.lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

inline SinusoidParams draw_params(const SinusoidRanges& ranges, std::uint64_t seed, std::size_t attempt) {
  AttemptRng rng(seed, attempt);
  SinusoidParams p;
  p.direction = ranges.direction;
  p.amplitude_max = ranges.amplitude.hi;
  for (std::size_t i = 0; i < ranges.terms; ++i) {
    SinusoidTerm t;
    t.amplitude = rng.uniform(ranges.amplitude);
    t.angular_frequency = rng.uniform(ranges.angular_frequency);
    t.phase = rng.uniform(ranges.phase);
    p.terms.push_back(t);
  }
  return p;
}

/// Rejection sampling: draw parameters per attempt, perturb, build the
/// e1/d1 trace and keep variants whose trace satisfies `spec`, until n are
/// accepted or the attempt budget runs out. Never throws on a short batch.
inline VariantBatch sample_variants(const Spline2D& base, const stl::Formula& spec, const SinusoidRanges& ranges,
                                    const GenerateOptions& options) {
  ranges.validate();
  require(options.n >= 1, ErrorCode::invalid_argument, "requested variant count must be positive");
  require(options.max_attempts >= options.n, ErrorCode::invalid_argument, "max_attempts must be at least n");
  for (const auto& name : stl::signal_names(spec)) {
    require(name == "e1" || name == "d1", ErrorCode::unbound_signal,
            "specification references '" + name + "'; only e1 and d1 are available");
  }

  VariantBatch batch{base, {}, 0, 0, options.seed};
  for (std::size_t attempt = 0; attempt < options.max_attempts && batch.accepted.size() < options.n; ++attempt) {
    ++batch.attempts;
    auto params = draw_params(ranges, options.seed, attempt);
    auto perturbed = perturb_spline(base, params, options.samples, options.horizon);
    const Spline2D& reference = (options.reference == DistanceReference::previous_variant && !batch.accepted.empty())
                                    ? batch.accepted.back().spline
                                    : base;
    auto trace = build_trace(reference, perturbed.spline, perturbed.e1);
    const auto verdict = stl::monitor(spec, trace.to_trace());
    if (!verdict.satisfied) {
      ++batch.rejected_count;
      continue;
    }
    batch.accepted.push_back({std::move(perturbed.spline), std::move(trace), verdict, std::move(params), attempt});
  }
  return batch;
}

/// sample_variants, failing with BudgetExhausted when fewer than n are accepted.
inline VariantBatch generate_variants(const Spline2D& base, const stl::Formula& spec, const SinusoidRanges& ranges,
                                      const GenerateOptions& options) {
  auto batch = sample_variants(base, spec, ranges, options);
  if (batch.accepted.size() < options.n) throw BudgetExhausted(std::move(batch), options.n);
  return batch;
}

}  // namespace roadscene::perturb
