#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <string>
#include <system_error>

#include "roadscene/geometry/spline_io.hpp"
#include "roadscene/io.hpp"
#include "roadscene/perturb/variants.hpp"

namespace roadscene::perturb {

inline std::string variant_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "variant_%03zu.json", index);
  return buf;
}

inline io::Json to_json(const SinusoidParams& p) {
  io::Json terms = io::Json::array();
  for (const auto& t : p.terms) {
    terms.push_back({{"amplitude", t.amplitude}, {"angular_frequency", t.angular_frequency}, {"phase", t.phase}});
  }
  return {{"direction", to_string(p.direction)}, {"amplitude_max", p.amplitude_max}, {"terms", std::move(terms)}};
}

/// Manifest for a batch: seed, spec text, acceptance statistics and
/// per-variant robustness. Contains nothing run-dependent beyond its inputs.
inline io::Json manifest_json(const VariantBatch& batch, const std::string& spec_text, const GenerateOptions& options) {
  io::Json variants = io::Json::array();
  for (std::size_t i = 0; i < batch.accepted.size(); ++i) {
    const auto& v = batch.accepted[i];
    variants.push_back({{"file", variant_file_name(i)},
                        {"attempt", v.attempt},
                        {"robustness", v.verdict.robustness},
                        {"max_deviation", max_deviation(batch.base, v.spline)},
                        {"perturbation", to_json(v.params)}});
  }
  return {{"seed", batch.seed},
          {"spec", spec_text},
          {"requested", options.n},
          {"attempts", batch.attempts},
          {"accepted", batch.accepted.size()},
          {"rejected", batch.rejected_count},
          {"acceptance_rate", batch.acceptance_rate()},
          {"samples", options.samples},
          {"horizon", options.horizon},
          {"reference", options.reference == DistanceReference::base ? "base" : "previous_variant"},
          {"variants", std::move(variants)}};
}

/// Writes base.json, variant_NNN.json and manifest.json into `dir`. The files
/// are staged in a sibling directory that replaces `dir` only once complete.
inline void write_batch(const std::filesystem::path& dir, const VariantBatch& batch, const std::string& spec_text,
                        const GenerateOptions& options) {
  namespace fs = std::filesystem;
  const fs::path stage = dir.parent_path() / ("." + dir.filename().string() + ".staging");
  std::error_code ec;
  fs::remove_all(stage, ec);
  fs::create_directories(stage);
  geometry::save_spline(stage / "base.json", batch.base);
  for (std::size_t i = 0; i < batch.accepted.size(); ++i) {
    geometry::save_spline(stage / variant_file_name(i), batch.accepted[i].spline);
  }
  io::write_json(stage / "manifest.json", manifest_json(batch, spec_text, options));
  fs::remove_all(dir, ec);
  fs::rename(stage, dir, ec);
  if (ec) fail(ErrorCode::io, "cannot move batch into " + dir.string() + ": " + ec.message());
}

}  // namespace roadscene::perturb
