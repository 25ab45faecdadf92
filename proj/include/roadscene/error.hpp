#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roadscene {

enum class ErrorCode {
  invalid_argument,
  io,
  // geometry
  too_few_points,
  degenerate_input,
  domain_error,
  invalid_order,
  // stl
  syntax_error,
  unknown_operator,
  malformed_interval,
  unbound_signal,
  empty_window,
  // imaging
  empty_mask,
  // perturb
  budget_exhausted,
  // tiles
  degenerate_spline,
  not_road_cell,
  // protocol
  malformed_frame,
  unknown_type,
  field_out_of_range,
  connection_refused,
  nack_received,
  timeout,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io: return "IoError";
    case ErrorCode::too_few_points: return "TooFewPoints";
    case ErrorCode::degenerate_input: return "DegenerateInput";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::invalid_order: return "InvalidOrder";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::unknown_operator: return "UnknownOperator";
    case ErrorCode::malformed_interval: return "MalformedInterval";
    case ErrorCode::unbound_signal: return "UnboundSignal";
    case ErrorCode::empty_window: return "EmptyWindow";
    case ErrorCode::empty_mask: return "EmptyMask";
    case ErrorCode::budget_exhausted: return "BudgetExhausted";
    case ErrorCode::degenerate_spline: return "DegenerateSpline";
    case ErrorCode::not_road_cell: return "NotRoadCell";
    case ErrorCode::malformed_frame: return "MalformedFrame";
    case ErrorCode::unknown_type: return "UnknownType";
    case ErrorCode::field_out_of_range: return "FieldOutOfRange";
    case ErrorCode::connection_refused: return "ConnectionRefused";
    case ErrorCode::nack_received: return "NackReceived";
    case ErrorCode::timeout: return "Timeout";
  }
  return "Unknown";
}

// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace roadscene
