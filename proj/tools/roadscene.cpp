// roadscene: command-line front end for the road scene pipeline.

#include <csignal>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadscene/cli/commands.hpp"

namespace {

using namespace roadscene;
namespace rc = roadscene::cli;

roadscene::protocol::SceneServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

protocol::Spawn parse_spawn(const std::string& text) {
  // kind,x,y,heading
  std::stringstream ss(text);
  std::string kind, x, y, heading;
  if (!std::getline(ss, kind, ',') || !std::getline(ss, x, ',') || !std::getline(ss, y, ',') ||
      !std::getline(ss, heading)) {
    fail(ErrorCode::invalid_argument, "spawn must be kind,x,y,heading: '" + text + "'");
  }
  try {
    return {kind, std::stod(x), std::stod(y), std::stod(heading)};
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, "spawn must be kind,x,y,heading: '" + text + "'");
  }
}

void add_spec_options(CLI::App* cmd, rc::SpecSource& spec) {
  auto* file = cmd->add_option_function<std::string>("--spec", [&spec](const std::string& p) { spec.file = p; },
                                                     "STL specification file");
  auto* text = cmd->add_option_function<std::string>("--formula", [&spec](const std::string& f) { spec.text = f; },
                                                     "STL specification given inline");
  file->excludes(text);
}

void add_range_option(CLI::App* cmd, const std::string& name, perturb::Range& range, const std::string& help) {
  cmd->add_option_function<std::vector<double>>(
         name, [&range](const std::vector<double>& v) { range = {v[0], v[1]}; }, help)
      ->expected(2)
      ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road scene pipeline: image to spline, STL-filtered variants, tile grids and a scene server"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "roadscene 1.0.0");

  int result = rc::kExitOk;

  // extract
  rc::ExtractOptions extract;
  std::string fit_mode = "centerline";
  std::string extract_ppm;
  auto* ex = app.add_subcommand("extract", "Fit a spline to the largest road region of a PGM image");
  ex->add_option("image", extract.image, "Input PGM image")->required();
  ex->add_option("--out,-o", extract.out, "Spline JSON to write")->required();
  ex->add_option("--threshold", extract.preprocess.threshold, "Foreground intensity threshold")
      ->capture_default_str();
  ex->add_option("--brightness", extract.preprocess.brightness_offset, "Brightness offset");
  ex->add_option("--contrast", extract.preprocess.contrast_gain, "Contrast gain about mid-gray");
  ex->add_option("--sharpness", extract.preprocess.sharpness_amount, "Unsharp-mask amount");
  ex->add_option("--blur", extract.preprocess.blur_sigma, "Gaussian blur sigma in pixels");
  ex->add_option("--n-ctrl", extract.fit.n_ctrl, "Control points of the fitted spline")->capture_default_str();
  ex->add_option("--stride", extract.fit.stride, "Contour subsampling stride")->capture_default_str();
  ex->add_option("--mode", fit_mode, "centerline or boundary")->capture_default_str();
  ex->add_option("--dump-ppm", extract_ppm, "Write the thresholded mask as PPM");
  ex->callback([&] {
    result = rc::guarded(std::cerr, [&] {
      extract.fit.mode = rc::parse_fit_mode(fit_mode);
      if (!extract_ppm.empty()) extract.dump_ppm = extract_ppm;
      return rc::cmd_extract(extract, std::cout, std::cerr);
    });
  });

  // perturb
  rc::PerturbOptions pert;
  std::string direction = "normal", reference = "base";
  auto* pe = app.add_subcommand("perturb", "Generate spline variants that satisfy an STL specification");
  pe->add_option("spline", pert.spline, "Base spline JSON")->required();
  add_spec_options(pe, pert.spec);
  pe->add_option("--out,-o", pert.out, "Output directory")->required();
  pe->add_option("--n,-n", pert.generate.n, "Variants to accept")->capture_default_str();
  pe->add_option("--seed", pert.generate.seed, "Random seed")->capture_default_str();
  pe->add_option("--max-attempts", pert.generate.max_attempts, "Attempt budget")->capture_default_str();
  pe->add_option("--samples", pert.generate.samples, "Trace samples per variant")->capture_default_str();
  pe->add_option("--horizon", pert.generate.horizon, "STL time spanned by the spline")->capture_default_str();
  pe->add_option("--terms", pert.ranges.terms, "Sinusoid terms per perturbation")->capture_default_str();
  pe->add_option("--direction", direction, "normal or fixed_y")->capture_default_str();
  pe->add_option("--reference", reference, "d1 reference: base or previous_variant")->capture_default_str();
  add_range_option(pe, "--amplitude", pert.ranges.amplitude, "Amplitude range lo,hi");
  add_range_option(pe, "--frequency", pert.ranges.angular_frequency, "Angular frequency range lo,hi");
  add_range_option(pe, "--phase", pert.ranges.phase, "Phase range lo,hi");
  pe->callback([&] {
    result = rc::guarded(std::cerr, [&] {
      pert.ranges.direction = rc::parse_direction(direction);
      pert.generate.reference = rc::parse_reference(reference);
      return rc::cmd_perturb(pert, std::cout, std::cerr);
    });
  });

  // monitor
  rc::MonitorOptions mon;
  auto* mo = app.add_subcommand("monitor", "Evaluate an STL specification on a trace (exit 0 SAT, 1 UNSAT)");
  mo->add_option("trace", mon.trace, "Trace JSON")->required();
  add_spec_options(mo, mon.spec);
  mo->callback([&] { result = rc::cmd_monitor(mon, std::cout, std::cerr); });

  // tiles
  rc::TilesOptions til;
  std::string tiles_ppm;
  auto* ti = app.add_subcommand("tiles", "Rasterize a spline into a coded tile grid");
  ti->add_option("spline", til.spline, "Spline JSON")->required();
  ti->add_option("--out,-o", til.out, "Tile grid JSON to write")->required();
  ti->add_option("--width", til.raster.grid_width, "Grid width in cells")->capture_default_str();
  ti->add_option("--height", til.raster.grid_height, "Grid height in cells")->capture_default_str();
  ti->add_option("--halfwidth", til.raster.road_halfwidth, "Road half-width in cells")->capture_default_str();
  ti->add_option("--samples", til.raster.samples, "Initial spline samples")->capture_default_str();
  ti->add_option("--dump-ppm", tiles_ppm, "Write the road mask as PPM");
  ti->callback([&] {
    if (!tiles_ppm.empty()) til.dump_ppm = tiles_ppm;
    result = rc::cmd_tiles(til, std::cout, std::cerr);
  });

  // send
  rc::SendCommandOptions snd;
  std::string send_transport = "stream";
  std::vector<std::string> spawn_text;
  auto* se = app.add_subcommand("send", "Stream a tile grid to a scene server");
  se->add_option("tiles", snd.tiles, "Tile grid JSON")->required();
  se->add_option("--endpoint", snd.endpoint, "host:port")->capture_default_str();
  se->add_option("--transport", send_transport, "stream or datagram")->capture_default_str();
  se->add_option("--spawn", spawn_text, "Agent as kind,x,y,heading (repeatable)");
  se->add_option("--tile-size", snd.send.tile_size, "World units per cell")->capture_default_str();
  se->add_option("--scene-id", snd.send.scene_id, "Scene identifier")->capture_default_str();
  se->add_option("--timeout-ms", snd.send.timeout_ms, "Acknowledgement timeout")->capture_default_str();
  se->callback([&] {
    result = rc::guarded(std::cerr, [&] {
      snd.transport = protocol::parse_transport(send_transport);
      for (const auto& s : spawn_text) snd.spawns.push_back(parse_spawn(s));
      return rc::cmd_send(snd, std::cout, std::cerr);
    });
  });

  // serve
  rc::ServeCommandOptions srv;
  std::string serve_transport = "stream";
  auto* sv = app.add_subcommand("serve", "Run the headless scene server until interrupted");
  sv->add_option("--endpoint", srv.endpoint, "Listen address host:port")->capture_default_str();
  sv->add_option("--transport", serve_transport, "stream or datagram")->capture_default_str();
  sv->add_option("--dump,--out,-o", srv.dump, "Scene dump written on each commit")->required();
  sv->callback([&] {
    result = rc::guarded(std::cerr, [&] {
      srv.transport = protocol::parse_transport(serve_transport);
      return rc::cmd_serve(srv, std::cout, std::cerr, [](protocol::SceneServer& server) {
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
      });
    });
    g_server = nullptr;
  });

  // pipeline
  std::string config_path;
  rc::PipelineOverrides ov;
  std::uint64_t seed = 0;
  std::string spec_file, formula, out_dir, endpoint, pipe_transport;
  auto* pi = app.add_subcommand("pipeline", "Run image -> spline -> variants -> tiles -> scene server");
  pi->add_option("config", config_path, "Pipeline config JSON")->required();
  auto* seed_opt = pi->add_option("--seed", seed, "Override perturb.seed");
  pi->add_option("--spec", spec_file, "Override the specification with a file");
  pi->add_option("--formula", formula, "Override the specification inline");
  pi->add_option("--out,-o", out_dir, "Override the output directory");
  pi->add_option("--endpoint", endpoint, "Override the endpoint (host:port or loopback)");
  pi->add_option("--transport", pipe_transport, "Override the transport");
  pi->add_flag("--dump-ppm", ov.dump_ppm, "Also write mask.ppm and raster.ppm");
  pi->callback([&] {
    result = rc::guarded(std::cerr, [&] {
      if (seed_opt->count() > 0) ov.seed = seed;
      if (!spec_file.empty()) ov.spec = rc::SpecSource{std::nullopt, spec_file}.resolve();
      if (!formula.empty()) ov.spec = formula;
      if (!out_dir.empty()) ov.out = out_dir;
      if (!endpoint.empty()) ov.endpoint = endpoint;
      if (!pipe_transport.empty()) ov.transport = protocol::parse_transport(pipe_transport);
      return rc::cmd_pipeline(config_path, ov, std::cout, std::cerr);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rc::kExitOk : rc::kExitInput;
  }
  return result;
}
