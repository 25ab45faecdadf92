#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "roadscene/error.hpp"

namespace roadscene {

/// A finite, timestamped real-valued signal. Timestamps are strictly
/// increasing and nonnegative; values are finite and aligned with them.
class SampledSignal {
 public:
  SampledSignal(std::string name, std::vector<double> timestamps, std::vector<double> values)
      : name_(std::move(name)), timestamps_(std::move(timestamps)), values_(std::move(values)) {
    require(!name_.empty(), ErrorCode::invalid_argument, "signal name must be nonempty");
    require(!timestamps_.empty(), ErrorCode::invalid_argument, "signal '" + name_ + "' has no samples");
    require(timestamps_.size() == values_.size(), ErrorCode::invalid_argument,
            "signal '" + name_ + "': timestamps and values differ in length");
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
      require(std::isfinite(timestamps_[i]) && timestamps_[i] >= 0.0, ErrorCode::invalid_argument,
              "signal '" + name_ + "': timestamps must be finite and nonnegative");
      require(i == 0 || timestamps_[i] > timestamps_[i - 1], ErrorCode::invalid_argument,
              "signal '" + name_ + "': timestamps must be strictly increasing");
      require(std::isfinite(values_[i]), ErrorCode::invalid_argument,
              "signal '" + name_ + "': values must be finite");
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& timestamps() const noexcept { return timestamps_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  SampledSignal renamed(std::string name) const { return {std::move(name), timestamps_, values_}; }
  SampledSignal retimed(std::vector<double> timestamps) const { return {name_, std::move(timestamps), values_}; }

  friend bool operator==(const SampledSignal&, const SampledSignal&) = default;

 private:
  std::string name_;
  std::vector<double> timestamps_;
  std::vector<double> values_;
};

/// Uniform grid of `samples` points spanning [0, horizon].
inline std::vector<double> uniform_grid(std::size_t samples, double horizon = 1.0) {
  require(samples >= 2, ErrorCode::invalid_argument, "grid needs at least 2 samples");
  std::vector<double> grid(samples);
  const double last = static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) grid[k] = horizon * (static_cast<double>(k) / last);
  return grid;
}

}  // namespace roadscene
