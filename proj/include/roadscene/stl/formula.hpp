#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>

#include "roadscene/error.hpp"

namespace roadscene::stl {

/// Closed time window [lo, hi] with 0 <= lo <= hi < inf.
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      fail(ErrorCode::malformed_interval, "interval bounds must be finite");
    }
    if (lo < 0.0 || hi < 0.0) fail(ErrorCode::malformed_interval, "interval bounds must be nonnegative");
    if (lo > hi) {
      fail(ErrorCode::malformed_interval, "interval lower bound exceeds upper bound");
    }
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
};

enum class Comparator { less, less_equal, greater, greater_equal };

constexpr const char* to_string(Comparator c) noexcept {
  switch (c) {
    case Comparator::less: return "<";
    case Comparator::less_equal: return "<=";
    case Comparator::greater: return ">";
    case Comparator::greater_equal: return ">=";
  }
  return "?";
}

/// signal ~ threshold, with ~ one of <, <=, >, >=.
struct Predicate {
  std::string signal;
  Comparator comparator = Comparator::less;
  double threshold = 0.0;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Node;

/// Immutable STL formula handle. Subtrees are shared, never mutated.
class Formula {
 public:
  static Formula truth();
  static Formula predicate(std::string signal, Comparator comparator, double threshold);
  static Formula negation(Formula operand);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  /// lhs -> rhs, stored as !lhs | rhs.
  static Formula implication(Formula lhs, Formula rhs);
  /// Temporal operators; an absent window means the remaining trace horizon.
  static Formula eventually(Formula operand, std::optional<Interval> window = std::nullopt);
  static Formula always(Formula operand, std::optional<Interval> window = std::nullopt);
  static Formula until(Formula lhs, Formula rhs, std::optional<Interval> window = std::nullopt);

  const Node& node() const noexcept { return *node_; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct True {
  friend bool operator==(const True&, const True&) = default;
};
struct Pred {
  Predicate predicate;
  friend bool operator==(const Pred&, const Pred&) = default;
};
struct Not {
  Formula operand;
  friend bool operator==(const Not&, const Not&) = default;
};
struct And {
  Formula lhs, rhs;
  friend bool operator==(const And&, const And&) = default;
};
struct Or {
  Formula lhs, rhs;
  friend bool operator==(const Or&, const Or&) = default;
};
struct Eventually {
  std::optional<Interval> window;
  Formula operand;
  friend bool operator==(const Eventually&, const Eventually&) = default;
};
struct Always {
  std::optional<Interval> window;
  Formula operand;
  friend bool operator==(const Always&, const Always&) = default;
};
struct Until {
  std::optional<Interval> window;
  Formula lhs, rhs;
  friend bool operator==(const Until&, const Until&) = default;
};

struct Node {
  std::variant<True, Pred, Not, And, Or, Eventually, Always, Until> value;
};

inline bool operator==(const Formula& a, const Formula& b) {
  return a.node_ == b.node_ || a.node_->value == b.node_->value;
}

inline Formula Formula::truth() { return Formula(std::make_shared<const Node>(Node{True{}})); }

inline Formula Formula::predicate(std::string signal, Comparator comparator, double threshold) {
  require(!signal.empty(), ErrorCode::invalid_argument, "predicate needs a signal name");
  require(std::isfinite(threshold), ErrorCode::invalid_argument, "predicate threshold must be finite");
  return Formula(std::make_shared<const Node>(Node{Pred{{std::move(signal), comparator, threshold}}}));
}

inline Formula Formula::negation(Formula operand) {
  return Formula(std::make_shared<const Node>(Node{Not{std::move(operand)}}));
}

inline Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{And{std::move(lhs), std::move(rhs)}}));
}

inline Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Or{std::move(lhs), std::move(rhs)}}));
}

inline Formula Formula::implication(Formula lhs, Formula rhs) {
  return disjunction(negation(std::move(lhs)), std::move(rhs));
}

inline Formula Formula::eventually(Formula operand, std::optional<Interval> window) {
  return Formula(std::make_shared<const Node>(Node{Eventually{window, std::move(operand)}}));
}

inline Formula Formula::always(Formula operand, std::optional<Interval> window) {
  return Formula(std::make_shared<const Node>(Node{Always{window, std::move(operand)}}));
}

inline Formula Formula::until(Formula lhs, Formula rhs, std::optional<Interval> window) {
  return Formula(std::make_shared<const Node>(Node{Until{window, std::move(lhs), std::move(rhs)}}));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

inline std::string format_window(const std::optional<Interval>& w) {
  if (!w) return "";
  return "[" + format_number(w->lo()) + "," + format_number(w->hi()) + "]";
}

inline void collect_signals(const Formula& f, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const True&) {},
                 [&](const Pred& p) { out.insert(p.predicate.signal); },
                 [&](const Not& n) { collect_signals(n.operand, out); },
                 [&](const And& n) {
                   collect_signals(n.lhs, out);
                   collect_signals(n.rhs, out);
                 },
                 [&](const Or& n) {
                   collect_signals(n.lhs, out);
                   collect_signals(n.rhs, out);
                 },
                 [&](const Eventually& n) { collect_signals(n.operand, out); },
                 [&](const Always& n) { collect_signals(n.operand, out); },
                 [&](const Until& n) {
                   collect_signals(n.lhs, out);
                   collect_signals(n.rhs, out);
                 },
             },
             f.node().value);
}

}  // namespace detail

/// Fully parenthesized concrete syntax; parse(to_string(f)) == f.
inline std::string to_string(const Formula& f) {
  return std::visit(
      overloaded{
          [](const True&) -> std::string { return "true"; },
          [](const Pred& p) {
            return p.predicate.signal + " " + to_string(p.predicate.comparator) + " " +
                   detail::format_number(p.predicate.threshold);
          },
          [](const Not& n) { return "!(" + to_string(n.operand) + ")"; },
          [](const And& n) { return "(" + to_string(n.lhs) + " & " + to_string(n.rhs) + ")"; },
          [](const Or& n) { return "(" + to_string(n.lhs) + " | " + to_string(n.rhs) + ")"; },
          [](const Eventually& n) { return "F" + detail::format_window(n.window) + "(" + to_string(n.operand) + ")"; },
          [](const Always& n) { return "G" + detail::format_window(n.window) + "(" + to_string(n.operand) + ")"; },
          [](const Until& n) {
            return "((" + to_string(n.lhs) + ") U" + detail::format_window(n.window) + "(" + to_string(n.rhs) + "))";
          },
      },
      f.node().value);
}

inline std::set<std::string> signal_names(const Formula& f) {
  std::set<std::string> out;
  detail::collect_signals(f, out);
  return out;
}

}  // namespace roadscene::stl
