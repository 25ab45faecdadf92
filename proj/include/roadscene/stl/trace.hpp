#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/io.hpp"
#include "roadscene/signal.hpp"

namespace roadscene::stl {

/// Named signals over one shared timestamp vector.
class Trace {
 public:
  explicit Trace(std::vector<SampledSignal> signals) {
    require(!signals.empty(), ErrorCode::invalid_argument, "trace needs at least one signal");
    const std::vector<double> shared = signals.front().timestamps();
    for (auto& s : signals) {
      require(s.timestamps() == shared, ErrorCode::invalid_argument,
              "signal '" + s.name() + "' does not share the trace timestamps");
      const std::string name = s.name();
      require(signals_.emplace(name, std::move(s)).second, ErrorCode::invalid_argument,
              "duplicate signal '" + name + "'");
    }
  }

  Trace(const std::vector<double>& timestamps, const std::map<std::string, std::vector<double>>& values)
      : Trace(make(timestamps, values)) {}

  std::size_t size() const noexcept { return signals_.begin()->second.size(); }
  const std::vector<double>& timestamps() const noexcept { return signals_.begin()->second.timestamps(); }
  bool contains(const std::string& name) const { return signals_.count(name) != 0; }

  const SampledSignal& signal(const std::string& name) const {
    auto it = signals_.find(name);
    if (it == signals_.end()) fail(ErrorCode::unbound_signal, "trace has no signal '" + name + "'");
    return it->second;
  }

  const std::map<std::string, SampledSignal>& signals() const noexcept { return signals_; }

 private:
  static std::vector<SampledSignal> make(const std::vector<double>& timestamps,
                                         const std::map<std::string, std::vector<double>>& values) {
    std::vector<SampledSignal> out;
    for (const auto& [name, v] : values) out.emplace_back(name, timestamps, v);
    return out;
  }

  std::map<std::string, SampledSignal> signals_;
};

// { "timestamps": [...], "signals": { "e1": [...], "d1": [...] } }
inline io::Json to_json(const Trace& trace) {
  io::Json signals = io::Json::object();
  for (const auto& [name, s] : trace.signals()) signals[name] = s.values();
  return {{"timestamps", trace.timestamps()}, {"signals", std::move(signals)}};
}

inline Trace trace_from_json(const io::Json& j) {
  try {
    const auto timestamps = j.at("timestamps").get<std::vector<double>>();
    std::map<std::string, std::vector<double>> values;
    for (const auto& [name, v] : j.at("signals").items()) values[name] = v.get<std::vector<double>>();
    return Trace(timestamps, values);
  } catch (const io::Json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("bad trace JSON: ") + e.what());
  }
}

inline Trace load_trace(const std::filesystem::path& path) { return trace_from_json(io::read_json(path)); }

}  // namespace roadscene::stl
