#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/stl/formula.hpp"
#include "roadscene/stl/trace.hpp"

namespace roadscene::stl {

/// Robustness of vacuous truths (true, G over an empty window). Falsity is its negation.
inline constexpr double kRobustnessTop = std::numeric_limits<double>::max();

/// Slack used when deciding whether a timestamp falls inside t + [a, b].
inline constexpr double kTimeTolerance = 1e-9;

struct Verdict {
  bool satisfied = false;
  double robustness = 0.0;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

namespace detail {

struct Window {
  std::size_t lo;
  std::size_t hi;  // inclusive; the window is empty when lo > hi
  bool empty() const noexcept { return lo > hi; }
};

/// Sample windows [lo_i, hi_i] of t_i + I for every i. Both ends are nondecreasing in i.
inline std::vector<Window> windows(const std::vector<double>& t, const std::optional<Interval>& interval) {
  const std::size_t n = t.size();
  std::vector<Window> out(n);
  if (!interval) {
    for (std::size_t i = 0; i < n; ++i) out[i] = {i, n - 1};
    return out;
  }
  std::size_t lo = 0;
  std::size_t hi = 0;  // one past the last admitted sample
  for (std::size_t i = 0; i < n; ++i) {
    const double from = t[i] + interval->lo() - kTimeTolerance;
    const double to = t[i] + interval->hi() + kTimeTolerance;
    lo = std::max(lo, i);
    while (lo < n && t[lo] < from) ++lo;
    hi = std::max(hi, lo);
    while (hi < n && t[hi] <= to) ++hi;
    out[i] = hi == 0 ? Window{1, 0} : Window{lo, hi - 1};
    if (lo >= n) out[i] = {1, 0};
  }
  return out;
}

template <class Better>
std::vector<double> sliding_extremum(const std::vector<double>& values, const std::vector<Window>& wins,
                                     double empty_value, Better better) {
  std::vector<double> out(values.size());
  std::deque<std::size_t> dq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Window w = wins[i];
    if (w.empty()) {
      out[i] = empty_value;
      continue;
    }
    while (next <= w.hi) {
      while (!dq.empty() && !better(values[dq.back()], values[next])) dq.pop_back();
      dq.push_back(next++);
    }
    while (!dq.empty() && dq.front() < w.lo) dq.pop_front();
    out[i] = values[dq.front()];
  }
  return out;
}

class RobustEvaluator {
 public:
  explicit RobustEvaluator(const Trace& trace) : trace_(trace) {}

  std::vector<double> eval(const Formula& f) const {
    const std::size_t n = trace_.size();
    return std::visit(
        overloaded{
            [&](const True&) { return std::vector<double>(n, kRobustnessTop); },
            [&](const Pred& p) {
              const auto& values = trace_.signal(p.predicate.signal).values();
              std::vector<double> out(n);
              const bool upper = p.predicate.comparator == Comparator::less ||
                                 p.predicate.comparator == Comparator::less_equal;
              for (std::size_t i = 0; i < n; ++i) {
                out[i] = upper ? p.predicate.threshold - values[i] : values[i] - p.predicate.threshold;
              }
              return out;
            },
            [&](const Not& x) {
              auto v = eval(x.operand);
              for (auto& r : v) r = -r;
              return v;
            },
            [&](const And& x) { return combine(eval(x.lhs), eval(x.rhs), false); },
            [&](const Or& x) { return combine(eval(x.lhs), eval(x.rhs), true); },
            [&](const Eventually& x) {
              return sliding_extremum(eval(x.operand), windows(trace_.timestamps(), x.window), -kRobustnessTop,
                                      [](double a, double b) { return a > b; });
            },
            [&](const Always& x) {
              return sliding_extremum(eval(x.operand), windows(trace_.timestamps(), x.window), kRobustnessTop,
                                      [](double a, double b) { return a < b; });
            },
            [&](const Until& x) {
              const auto lhs = eval(x.lhs);
              const auto rhs = eval(x.rhs);
              const auto wins = windows(trace_.timestamps(), x.window);
              std::vector<double> out(n, -kRobustnessTop);
              for (std::size_t i = 0; i < n; ++i) {
                if (wins[i].empty()) continue;
                double prefix = kRobustnessTop;  // min of lhs over [i, j]
                double best = -kRobustnessTop;
                for (std::size_t j = i; j <= wins[i].hi; ++j) {
                  prefix = std::min(prefix, lhs[j]);
                  if (j >= wins[i].lo) best = std::max(best, std::min(rhs[j], prefix));
                }
                out[i] = best;
              }
              return out;
            },
        },
        f.node().value);
  }

 private:
  static std::vector<double> combine(std::vector<double> a, const std::vector<double>& b, bool take_max) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = take_max ? std::max(a[i], b[i]) : std::min(a[i], b[i]);
    return a;
  }

  const Trace& trace_;
};

class BooleanEvaluator {
 public:
  explicit BooleanEvaluator(const Trace& trace) : trace_(trace) {}

  std::vector<char> eval(const Formula& f) const {
    const std::size_t n = trace_.size();
    return std::visit(
        overloaded{
            [&](const True&) { return std::vector<char>(n, 1); },
            [&](const Pred& p) {
              const auto& values = trace_.signal(p.predicate.signal).values();
              const double c = p.predicate.threshold;
              std::vector<char> out(n);
              for (std::size_t i = 0; i < n; ++i) {
                const double v = values[i];
                switch (p.predicate.comparator) {
                  case Comparator::less: out[i] = v < c; break;
                  case Comparator::less_equal: out[i] = v <= c; break;
                  case Comparator::greater: out[i] = v > c; break;
                  case Comparator::greater_equal: out[i] = v >= c; break;
                }
              }
              return out;
            },
            [&](const Not& x) {
              auto v = eval(x.operand);
              for (auto& b : v) b = !b;
              return v;
            },
            [&](const And& x) {
              auto a = eval(x.lhs);
              const auto b = eval(x.rhs);
              for (std::size_t i = 0; i < n; ++i) a[i] = a[i] && b[i];
              return a;
            },
            [&](const Or& x) {
              auto a = eval(x.lhs);
              const auto b = eval(x.rhs);
              for (std::size_t i = 0; i < n; ++i) a[i] = a[i] || b[i];
              return a;
            },
            [&](const Eventually& x) { return count_window(eval(x.operand), x.window, false); },
            [&](const Always& x) { return count_window(eval(x.operand), x.window, true); },
            [&](const Until& x) {
              const auto lhs = eval(x.lhs);
              const auto rhs = eval(x.rhs);
              const auto wins = windows(trace_.timestamps(), x.window);
              std::vector<char> out(n, 0);
              for (std::size_t i = 0; i < n; ++i) {
                if (wins[i].empty()) continue;
                for (std::size_t j = i; j <= wins[i].hi && lhs[j]; ++j) {
                  if (j >= wins[i].lo && rhs[j]) {
                    out[i] = 1;
                    break;
                  }
                }
              }
              return out;
            },
        },
        f.node().value);
  }

 private:
  // G: every sample in the window holds (vacuous on empty). F: some sample holds.
  std::vector<char> count_window(const std::vector<char>& v, const std::optional<Interval>& interval,
                                 bool all) const {
    const std::size_t n = v.size();
    std::vector<std::size_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (v[i] ? 1 : 0);
    const auto wins = windows(trace_.timestamps(), interval);
    std::vector<char> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (wins[i].empty()) {
        out[i] = all;
        continue;
      }
      const std::size_t hits = prefix[wins[i].hi + 1] - prefix[wins[i].lo];
      const std::size_t len = wins[i].hi - wins[i].lo + 1;
      out[i] = all ? hits == len : hits > 0;
    }
    return out;
  }

  const Trace& trace_;
};

inline void check_binding(const Formula& f, const Trace& trace, std::size_t t_index) {
  for (const auto& name : signal_names(f)) {
    if (!trace.contains(name)) fail(ErrorCode::unbound_signal, "formula references unbound signal '" + name + "'");
  }
  if (t_index >= trace.size()) {
    fail(ErrorCode::domain_error,
         "sample index " + std::to_string(t_index) + " beyond trace of length " + std::to_string(trace.size()));
  }
}

}  // namespace detail

/// Boolean satisfaction at every sample index.
inline std::vector<char> satisfaction_signal(const Formula& f, const Trace& trace) {
  detail::check_binding(f, trace, 0);
  return detail::BooleanEvaluator(trace).eval(f);
}

/// Robustness at every sample index.
inline std::vector<double> robustness_signal(const Formula& f, const Trace& trace) {
  detail::check_binding(f, trace, 0);
  return detail::RobustEvaluator(trace).eval(f);
}

inline bool monitor_bool(const Formula& f, const Trace& trace, std::size_t t_index = 0) {
  detail::check_binding(f, trace, t_index);
  return detail::BooleanEvaluator(trace).eval(f)[t_index] != 0;
}

inline double monitor_robust(const Formula& f, const Trace& trace, std::size_t t_index = 0) {
  detail::check_binding(f, trace, t_index);
  return detail::RobustEvaluator(trace).eval(f)[t_index];
}

/// Both semantics at the first sample.
inline Verdict monitor(const Formula& f, const Trace& trace) {
  return {monitor_bool(f, trace, 0), monitor_robust(f, trace, 0)};
}

}  // namespace roadscene::stl
