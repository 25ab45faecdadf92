#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>

#include "roadscene/error.hpp"
#include "roadscene/imaging/centerline.hpp"
#include "roadscene/imaging/preprocess.hpp"
#include "roadscene/io.hpp"
#include "roadscene/perturb/variants.hpp"
#include "roadscene/protocol/socket.hpp"
#include "roadscene/stl/parser.hpp"
#include "roadscene/tiles/raster.hpp"

namespace roadscene::cli {

namespace fs = std::filesystem;

struct FitConfig {
  std::size_t n_ctrl = 12;
  std::size_t stride = 2;
  imaging::ContourFit mode = imaging::ContourFit::centerline;
};

struct PerturbConfig {
  std::string spec = "G(e1 < 10)";
  perturb::SinusoidRanges ranges;
  perturb::GenerateOptions generate;  // n, seed, max_attempts, samples, horizon, reference
};

/// Endpoint "loopback" runs a scene server inside the pipeline process.
struct SendConfig {
  std::optional<std::string> endpoint;
  protocol::Transport transport = protocol::Transport::stream;
  double tile_size = 1.0;
  std::string scene_id = "pipeline";
  int timeout_ms = 5000;
};

struct PipelineConfig {
  fs::path image;
  fs::path out = "roadscene-out";
  imaging::PreprocessParams preprocess;
  FitConfig fit;
  PerturbConfig perturb;
  tiles::RasterParams raster;
  SendConfig send;

  /// Checks every section and parses the spec; throws before any output exists.
  void validate() const {
    require(!image.empty(), ErrorCode::invalid_argument, "config: image is required");
    require(!out.empty(), ErrorCode::invalid_argument, "config: out is required");
    preprocess.validate();
    require(fit.n_ctrl >= 4, ErrorCode::invalid_argument, "config: fit.n_ctrl must be at least 4");
    require(fit.stride >= 1, ErrorCode::invalid_argument, "config: fit.stride must be positive");
    perturb.ranges.validate();
    require(perturb.generate.max_attempts >= perturb.generate.n, ErrorCode::invalid_argument,
            "config: perturb.max_attempts must be at least perturb.n");
    require(perturb.generate.samples >= 2, ErrorCode::invalid_argument, "config: perturb.samples must be at least 2");
    require(perturb.generate.horizon > 0.0, ErrorCode::invalid_argument, "config: perturb.horizon must be positive");
    stl::parse(perturb.spec);
    raster.validate();
    require(send.tile_size > 0.0, ErrorCode::invalid_argument, "config: tile_size must be positive");
    require(send.timeout_ms > 0, ErrorCode::invalid_argument, "config: timeout_ms must be positive");
    if (send.endpoint && *send.endpoint != "loopback") protocol::parse_endpoint(*send.endpoint);
  }
};

namespace detail {

/// Strict object reader: unknown keys and mistyped values are input errors.
class Section {
 public:
  Section(const io::Json& j, std::string where) : j_(j), where_(std::move(where)) {
    require(j.is_object(), ErrorCode::invalid_argument, where_ + " must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& item : j_.items()) {
      bool known = false;
      for (const char* k : keys) known = known || item.key() == k;
      require(known, ErrorCode::invalid_argument, where_ + ": unknown key '" + item.key() + "'");
    }
  }

  const io::Json* find(const char* key) const {
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void read(const char* key, double& v) const {
    if (auto* x = find(key)) {
      require(x->is_number(), ErrorCode::invalid_argument, name(key) + " must be a number");
      v = x->get<double>();
    }
  }
  void read(const char* key, int& v) const {
    if (auto* x = find(key)) {
      require(x->is_number_integer(), ErrorCode::invalid_argument, name(key) + " must be an integer");
      v = x->get<int>();
    }
  }
  void read(const char* key, std::size_t& v) const {
    if (auto* x = find(key)) {
      require(x->is_number_unsigned() || (x->is_number_integer() && x->get<long long>() >= 0),
              ErrorCode::invalid_argument, name(key) + " must be a nonnegative integer");
      v = x->get<std::size_t>();
    }
  }
  void read(const char* key, std::string& v) const {
    if (auto* x = find(key)) {
      require(x->is_string(), ErrorCode::invalid_argument, name(key) + " must be a string");
      v = x->get<std::string>();
    }
  }
  void read(const char* key, perturb::Range& v) const {
    if (auto* x = find(key)) {
      require(x->is_array() && x->size() == 2 && (*x)[0].is_number() && (*x)[1].is_number(),
              ErrorCode::invalid_argument, name(key) + " must be [lo, hi]");
      v = {(*x)[0].get<double>(), (*x)[1].get<double>()};
    }
  }

  std::string name(const char* key) const { return where_ + "." + key; }

 private:
  const io::Json& j_;
  std::string where_;
};

}  // namespace detail

inline imaging::ContourFit parse_fit_mode(const std::string& s) {
  if (s == "centerline") return imaging::ContourFit::centerline;
  if (s == "boundary") return imaging::ContourFit::boundary;
  fail(ErrorCode::invalid_argument, "fit mode must be centerline or boundary, got '" + s + "'");
}

inline perturb::OffsetDirection parse_direction(const std::string& s) {
  if (s == "normal") return perturb::OffsetDirection::normal;
  if (s == "fixed_y") return perturb::OffsetDirection::fixed_y;
  fail(ErrorCode::invalid_argument, "direction must be normal or fixed_y, got '" + s + "'");
}

inline perturb::DistanceReference parse_reference(const std::string& s) {
  if (s == "base") return perturb::DistanceReference::base;
  if (s == "previous_variant") return perturb::DistanceReference::previous_variant;
  fail(ErrorCode::invalid_argument, "reference must be base or previous_variant, got '" + s + "'");
}

inline void read_preprocess(const io::Json& j, imaging::PreprocessParams& p) {
  detail::Section s(j, "preprocess");
  s.allow({"brightness_offset", "contrast_gain", "sharpness_amount", "blur_sigma", "threshold"});
  s.read("brightness_offset", p.brightness_offset);
  s.read("contrast_gain", p.contrast_gain);
  s.read("sharpness_amount", p.sharpness_amount);
  s.read("blur_sigma", p.blur_sigma);
  s.read("threshold", p.threshold);
}

inline void read_raster(const io::Json& j, tiles::RasterParams& r) {
  detail::Section s(j, "raster");
  s.allow({"grid_width", "grid_height", "road_halfwidth", "samples"});
  s.read("grid_width", r.grid_width);
  s.read("grid_height", r.grid_height);
  s.read("road_halfwidth", r.road_halfwidth);
  s.read("samples", r.samples);
}

inline void read_ranges(const io::Json& j, perturb::SinusoidRanges& r) {
  detail::Section s(j, "perturb.ranges");
  s.allow({"amplitude", "angular_frequency", "phase", "terms", "direction"});
  s.read("amplitude", r.amplitude);
  s.read("angular_frequency", r.angular_frequency);
  s.read("phase", r.phase);
  s.read("terms", r.terms);
  std::string direction = to_string(r.direction);
  s.read("direction", direction);
  r.direction = parse_direction(direction);
}

inline void read_perturb(const io::Json& j, PerturbConfig& p) {
  detail::Section s(j, "perturb");
  s.allow({"spec", "ranges", "n", "seed", "max_attempts", "samples", "horizon", "reference"});
  s.read("spec", p.spec);
  if (auto* r = s.find("ranges")) read_ranges(*r, p.ranges);
  s.read("n", p.generate.n);
  std::size_t seed = p.generate.seed;
  s.read("seed", seed);
  p.generate.seed = seed;
  s.read("max_attempts", p.generate.max_attempts);
  s.read("samples", p.generate.samples);
  s.read("horizon", p.generate.horizon);
  std::string reference = "base";
  s.read("reference", reference);
  p.generate.reference = parse_reference(reference);
}

/// Parses a pipeline config. Relative image and out paths resolve against
/// `base_dir` (normally the config file's directory).
inline PipelineConfig pipeline_config_from_json(const io::Json& j, const fs::path& base_dir = {}) {
  PipelineConfig c;
  detail::Section s(j, "config");
  s.allow({"image", "out", "preprocess", "fit", "perturb", "raster", "endpoint", "transport", "tile_size", "scene_id",
           "timeout_ms"});
  std::string image, out = c.out.string();
  s.read("image", image);
  s.read("out", out);
  c.image = image.empty() ? fs::path() : base_dir / image;
  c.out = base_dir / out;
  if (auto* p = s.find("preprocess")) read_preprocess(*p, c.preprocess);
  if (auto* f = s.find("fit")) {
    detail::Section fit(*f, "fit");
    fit.allow({"n_ctrl", "stride", "mode"});
    fit.read("n_ctrl", c.fit.n_ctrl);
    fit.read("stride", c.fit.stride);
    std::string mode = "centerline";
    fit.read("mode", mode);
    c.fit.mode = parse_fit_mode(mode);
  }
  if (auto* p = s.find("perturb")) read_perturb(*p, c.perturb);
  if (auto* r = s.find("raster")) read_raster(*r, c.raster);
  std::string endpoint;
  s.read("endpoint", endpoint);
  if (!endpoint.empty()) c.send.endpoint = endpoint;
  std::string transport = protocol::to_string(c.send.transport);
  s.read("transport", transport);
  c.send.transport = protocol::parse_transport(transport);
  s.read("tile_size", c.send.tile_size);
  s.read("scene_id", c.send.scene_id);
  s.read("timeout_ms", c.send.timeout_ms);
  return c;
}

inline PipelineConfig load_pipeline_config(const fs::path& path) {
  return pipeline_config_from_json(io::read_json(path), path.parent_path());
}

}  // namespace roadscene::cli
