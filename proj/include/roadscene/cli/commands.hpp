#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "roadscene/cli/config.hpp"
#include "roadscene/error.hpp"
#include "roadscene/geometry/spline_io.hpp"
#include "roadscene/imaging/centerline.hpp"
#include "roadscene/imaging/contour.hpp"
#include "roadscene/imaging/pgm.hpp"
#include "roadscene/imaging/preprocess.hpp"
#include "roadscene/io.hpp"
#include "roadscene/perturb/batch_io.hpp"
#include "roadscene/perturb/variants.hpp"
#include "roadscene/protocol/sender.hpp"
#include "roadscene/protocol/server.hpp"
#include "roadscene/stl/monitor.hpp"
#include "roadscene/stl/parser.hpp"
#include "roadscene/stl/trace.hpp"
#include "roadscene/tiles/raster.hpp"
#include "roadscene/tiles/tile_grid.hpp"

namespace roadscene::cli {

enum ExitCode : int { kExitOk = 0, kExitUnsat = 1, kExitInput = 2, kExitRuntime = 3 };

inline int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::budget_exhausted:
    case ErrorCode::connection_refused:
    case ErrorCode::nack_received:
    case ErrorCode::timeout:
      return kExitRuntime;
    default:
      return kExitInput;
  }
}

/// Runs a command body, reporting failures on `err` as an exit code.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

/// A spec given inline wins over a spec file.
struct SpecSource {
  std::optional<std::string> text;
  std::optional<fs::path> file;

  std::string resolve() const {
    if (text) return *text;
    require(file.has_value(), ErrorCode::invalid_argument, "a specification is required (--spec or --formula)");
    auto s = io::read_file(*file);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  }
};

// ---------------------------------------------------------------- extract

struct ExtractOptions {
  fs::path image;
  fs::path out;
  imaging::PreprocessParams preprocess;
  FitConfig fit;
  std::optional<fs::path> dump_ppm;  // thresholded mask, for debugging
};

struct Extraction {
  imaging::BinaryMask mask;
  imaging::Contour contour;
  geometry::FitResult fit;
};

/// Image to spline: preprocess, threshold, largest contour, fit.
inline Extraction extract_road(const imaging::GrayImage& image, const imaging::PreprocessParams& preprocess,
                               const FitConfig& fit) {
  preprocess.validate();
  auto mask = imaging::threshold(imaging::preprocess(image, preprocess), preprocess.threshold);
  auto contours = imaging::trace_contour(mask);
  auto result = imaging::contour_to_spline(contours.front(), fit.n_ctrl, fit.stride, fit.mode);
  return {std::move(mask), std::move(contours.front()), std::move(result)};
}

inline int cmd_extract(const ExtractOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(!o.out.empty(), ErrorCode::invalid_argument, "an output path is required");
    const auto ex = extract_road(imaging::load_pgm(o.image), o.preprocess, o.fit);
    if (o.dump_ppm) imaging::save_mask_ppm(*o.dump_ppm, ex.mask);
    geometry::save_spline(o.out, ex.fit.spline);
    out << "contour " << ex.contour.points.size() << " points, fit max residual " << ex.fit.max_residual
        << " px -> " << o.out.string() << "\n";
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------- perturb

struct PerturbOptions {
  fs::path spline;
  SpecSource spec;
  fs::path out;
  perturb::SinusoidRanges ranges;
  perturb::GenerateOptions generate;
};

inline int cmd_perturb(const PerturbOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(!o.out.empty(), ErrorCode::invalid_argument, "an output directory is required");
    const std::string spec_text = o.spec.resolve();
    const auto spec = stl::parse(spec_text);
    const auto base = geometry::load_spline(o.spline);
    const auto batch = perturb::generate_variants(base, spec, o.ranges, o.generate);
    perturb::write_batch(o.out, batch, spec_text, o.generate);
    out << batch.accepted.size() << " variants accepted in " << batch.attempts << " attempts -> "
        << o.out.string() << "\n";
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------- monitor

struct MonitorOptions {
  fs::path trace;
  SpecSource spec;
};

inline std::string verdict_line(const stl::Verdict& v) {
  return std::string(v.satisfied ? "SAT" : "UNSAT") + " \xCF\x81=" + stl::detail::format_number(v.robustness);
}

inline int cmd_monitor(const MonitorOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = stl::parse(o.spec.resolve());
    const auto verdict = stl::monitor(spec, stl::load_trace(o.trace));
    out << verdict_line(verdict) << "\n";
    return int{verdict.satisfied ? kExitOk : kExitUnsat};
  });
}

// ---------------------------------------------------------------- tiles

struct TilesOptions {
  fs::path spline;
  fs::path out;
  tiles::RasterParams raster;
  std::optional<fs::path> dump_ppm;
};

inline int cmd_tiles(const TilesOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(!o.out.empty(), ErrorCode::invalid_argument, "an output path is required");
    const auto mask = tiles::rasterize(geometry::load_spline(o.spline), o.raster);
    const auto grid = tiles::synthesize(mask);
    if (o.dump_ppm) imaging::save_mask_ppm(*o.dump_ppm, mask);
    tiles::save_tile_grid(o.out, grid);
    out << grid.road_count() << " road cells on " << grid.width << "x" << grid.height << " -> " << o.out.string()
        << "\n";
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------- send / serve

struct SendCommandOptions {
  fs::path tiles;
  std::string endpoint = "127.0.0.1:7777";
  protocol::Transport transport = protocol::Transport::stream;
  std::vector<protocol::Spawn> spawns;
  protocol::SendOptions send;
};

inline int cmd_send(const SendCommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto grid = tiles::load_tile_grid(o.tiles);
    const auto summary =
        protocol::send_scene(grid, o.spawns, protocol::parse_endpoint(o.endpoint), o.transport, o.send);
    out << "sent " << summary.tiles_sent << " tiles and " << summary.spawns_sent << " spawns: "
        << summary.final_ack.status << " " << summary.final_ack.detail << "\n";
    return int{kExitOk};
  });
}

struct ServeCommandOptions {
  std::string endpoint = "127.0.0.1:7777";
  protocol::Transport transport = protocol::Transport::stream;
  fs::path dump;
};

/// Binds, reports the bound address on `out`, then blocks in run(). The
/// `on_ready` hook receives the server so callers can stop it.
inline int cmd_serve(const ServeCommandOptions& o, std::ostream& out, std::ostream& err,
                     const std::function<void(protocol::SceneServer&)>& on_ready = {}) {
  return guarded(err, [&] {
    require(!o.dump.empty(), ErrorCode::invalid_argument, "a dump path is required");
    protocol::SceneServer server({protocol::parse_endpoint(o.endpoint), o.transport, o.dump});
    out << "serving " << protocol::to_string(o.transport) << " on " << server.endpoint().str() << ", dump "
        << o.dump.string() << std::endl;
    if (on_ready) on_ready(server);
    server.run();
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------- pipeline

struct PipelineOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> spec;
  std::optional<fs::path> out;
  std::optional<std::string> endpoint;
  std::optional<protocol::Transport> transport;
  bool dump_ppm = false;
};

inline void apply_overrides(PipelineConfig& c, const PipelineOverrides& o) {
  if (o.seed) c.perturb.generate.seed = *o.seed;
  if (o.spec) c.perturb.spec = *o.spec;
  if (o.out) c.out = *o.out;
  if (o.endpoint) c.send.endpoint = *o.endpoint;
  if (o.transport) c.send.transport = *o.transport;
}

/// One agent at the start of the road, facing along it, in world units.
inline protocol::Spawn start_spawn(const geometry::Spline2D& grid_spline, double tile_size) {
  const auto p = grid_spline.eval(0.0);
  const auto d = grid_spline.derivative(0.0);
  return {"car", p.x * tile_size, p.y * tile_size, std::atan2(d.y, d.x)};
}

/// image -> spline -> variants -> tiles -> scene server. Every output is
/// staged beside `out` and moved into place only after the scene was
/// accepted, so a failed run leaves nothing behind.
inline int run_pipeline(PipelineConfig config, bool dump_ppm, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const std::string spec_text = config.perturb.spec;
    const auto spec = stl::parse(spec_text);

    const auto ex = extract_road(imaging::load_pgm(config.image), config.preprocess, config.fit);
    const auto& base = ex.fit.spline;
    out << "extract: contour " << ex.contour.points.size() << " points, fit max residual " << ex.fit.max_residual
        << " px\n";

    std::optional<perturb::VariantBatch> batch;
    if (config.perturb.generate.n > 0) {
      batch = perturb::generate_variants(base, spec, config.perturb.ranges, config.perturb.generate);
      out << "perturb: " << batch->accepted.size() << " accepted in " << batch->attempts << " attempts\n";
    }
    const auto& road = batch ? batch->accepted.front().spline : base;

    const auto transform = tiles::grid_transform(road, config.raster);
    const auto mask = tiles::rasterize(road, config.raster);
    const auto grid = tiles::synthesize(mask);
    out << "tiles: " << grid.road_count() << " road cells on " << grid.width << "x" << grid.height << "\n";

    const fs::path stage = config.out.parent_path() / ("." + config.out.filename().string() + ".staging");
    std::error_code ec;
    fs::remove_all(stage, ec);
    fs::create_directories(stage);
    try {
      geometry::save_spline(stage / "spline.json", base);
      if (batch) perturb::write_batch(stage / "variants", *batch, spec_text, config.perturb.generate);
      tiles::save_tile_grid(stage / "tiles.json", grid);
      if (dump_ppm) {
        imaging::save_mask_ppm(stage / "mask.ppm", ex.mask);
        imaging::save_mask_ppm(stage / "raster.ppm", mask);
      }

      if (config.send.endpoint) {
        const std::vector<protocol::Spawn> spawns{start_spawn(transform.apply(road), config.send.tile_size)};
        protocol::SendOptions send{config.send.tile_size, config.send.scene_id, config.send.timeout_ms, 0.0, 0};
        std::optional<protocol::SceneServer> server;
        std::thread server_thread;
        protocol::Endpoint endpoint;
        if (*config.send.endpoint == "loopback") {
          server.emplace(protocol::ServeOptions{{"127.0.0.1", 0}, config.send.transport, stage / "scene.json"});
          endpoint = server->endpoint();
          server_thread = std::thread([&] { server->run(); });
        } else {
          endpoint = protocol::parse_endpoint(*config.send.endpoint);
        }
        auto stop_server = [&] {
          if (server) server->stop();
          if (server_thread.joinable()) server_thread.join();
        };
        try {
          const auto summary = protocol::send_scene(grid, spawns, endpoint, config.send.transport, send);
          out << "send: " << summary.tiles_sent << " tiles to " << endpoint.str() << ": " << summary.final_ack.detail
              << "\n";
        } catch (...) {
          stop_server();
          throw;
        }
        stop_server();
      }
    } catch (...) {
      fs::remove_all(stage, ec);
      throw;
    }

    fs::remove_all(config.out, ec);
    fs::rename(stage, config.out, ec);
    if (ec) fail(ErrorCode::io, "cannot move outputs into " + config.out.string() + ": " + ec.message());
    out << "outputs -> " << config.out.string() << "\n";
    return int{kExitOk};
  });
}

inline int cmd_pipeline(const fs::path& config_path, const PipelineOverrides& overrides, std::ostream& out,
                        std::ostream& err) {
  std::optional<PipelineConfig> config;
  const int rc = guarded(err, [&] {
    config = load_pipeline_config(config_path);
    apply_overrides(*config, overrides);
    return int{kExitOk};
  });
  if (rc != kExitOk) return rc;
  return run_pipeline(std::move(*config), overrides.dump_ppm, out, err);
}

}  // namespace roadscene::cli
