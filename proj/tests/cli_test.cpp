#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "oracles/geometry_oracle.hpp"
#include "oracles/raster_oracle.hpp"
#include "roadscene/cli/commands.hpp"
#include "roadscene/imaging/pgm.hpp"
#include "roadscene/protocol/session.hpp"
#include "roadscene/protocol/server.hpp"
#include "roadscene/tiles/connectivity.hpp"
#include "support.hpp"

namespace {

using namespace roadscene;
using namespace roadscene::cli;
namespace fs = std::filesystem;

// Runs the installed binary and returns its exit status.
int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string capture = (fs::temp_directory_path() / ("roadscene-cli-" + std::to_string(::getpid()) + ".log")).string();
  const std::string command = std::string(ROADSCENE_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(command.c_str());
  if (output != nullptr) *output = io::read_file(capture);
  fs::remove(capture);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Fraction of mask pixels within `tolerance` of the spline.
double coverage(const imaging::BinaryMask& mask, const geometry::Spline2D& s, double tolerance) {
  std::vector<oracle::P> poly;
  for (const auto& p : s.sample(3000)) poly.push_back({p.x, p.y});
  std::size_t hit = 0, total = 0;
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      ++total;
      hit += oracle::distance_to_polyline({double(x), double(y)}, poly) <= tolerance;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

fs::path write_pipeline_config(const fs::path& dir, const std::string& spec, std::uint64_t seed) {
  imaging::save_pgm(dir / "road.pgm", testing_support::road_image(160, 120, testing_support::sample_road(), 4.0));
  io::Json c = {
      {"image", "road.pgm"},
      {"out", "run"},
      {"fit", {{"n_ctrl", 10}, {"stride", 2}}},
      {"perturb",
       {{"spec", spec}, {"n", 2}, {"seed", seed}, {"max_attempts", 50}, {"ranges", {{"amplitude", {0.0, 3.0}}}}}},
      {"raster", {{"grid_width", 48}, {"grid_height", 36}, {"road_halfwidth", 0.5}}},
      {"endpoint", "loopback"},
  };
  io::write_json(dir / "config.json", c);
  return dir / "config.json";
}

TEST(Extract, BarImageGivesLoadableSpline) {
  testing_support::ScratchDir dir("cli");
  imaging::save_pgm(dir / "bar.pgm", testing_support::bar_image(80, 30, 10, 12, 60, 6));
  ExtractOptions o;
  o.image = dir / "bar.pgm";
  o.out = dir / "bar.json";
  o.fit.n_ctrl = 5;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_extract(o, out, err), kExitOk) << err.str();
  const auto s = geometry::load_spline(dir / "bar.json");
  EXPECT_EQ(s.size(), 5u);
  for (const auto& p : s.sample(100)) EXPECT_NEAR(p.y, 14.5, 1.0);
}

TEST(Extract, BlackImageIsAnInputError) {
  testing_support::ScratchDir dir("cli");
  imaging::save_pgm(dir / "black.pgm", imaging::GrayImage(20, 20, 0));
  std::string log;
  EXPECT_EQ(run_cli("extract " + q(dir / "black.pgm") + " -o " + q(dir / "s.json"), &log), 2);
  EXPECT_NE(log.find("EmptyMask"), std::string::npos) << log;
  EXPECT_FALSE(fs::exists(dir / "s.json"));
}

TEST(Extract, SampleRoadCoverage) {
  const auto img = testing_support::road_image(160, 120, testing_support::sample_road(), 4.0);
  const auto ex = extract_road(img, {}, {12, 2, imaging::ContourFit::centerline});
  EXPECT_GE(coverage(ex.mask, ex.fit.spline, 4.0 + 1.0), 0.9);
}

TEST(Monitor, VerdictLineAndExitCodes) {
  testing_support::ScratchDir dir("cli");
  io::write_json(dir / "trace.json", {{"timestamps", {0, 1, 2}}, {"signals", {{"e1", {1, 2, 5}}}}});
  std::string log;
  EXPECT_EQ(run_cli("monitor " + q(dir / "trace.json") + " --formula 'G(e1 < 10)'", &log), 0);
  EXPECT_EQ(log, "SAT ρ=5\n");
  EXPECT_EQ(run_cli("monitor " + q(dir / "trace.json") + " --formula 'G(e1 < 3)'", &log), 1);
  EXPECT_EQ(log, "UNSAT ρ=-2\n");
  io::write_file_atomic(dir / "spec.stl", "F(e1 > 4)\n");
  EXPECT_EQ(run_cli("monitor " + q(dir / "trace.json") + " --spec " + q(dir / "spec.stl"), &log), 0);
  EXPECT_EQ(run_cli("monitor " + q(dir / "trace.json") + " --formula 'G(e1 <'", &log), 2);
  EXPECT_NE(log.find("SyntaxError"), std::string::npos) << log;
  EXPECT_EQ(run_cli("monitor " + q(dir / "trace.json") + " --formula 'G(speed < 3)'", &log), 2);
  EXPECT_EQ(run_cli("monitor", &log), 2);
}

TEST(PerturbAndTiles, CommandsWriteOutputs) {
  testing_support::ScratchDir dir("cli");
  std::mt19937_64 rng(60);
  geometry::save_spline(dir / "base.json", testing_support::random_smooth_spline(rng));
  std::string log;
  ASSERT_EQ(run_cli("perturb " + q(dir / "base.json") + " --formula 'G(d1 < 10)' -n 3 --seed 4 -o " + q(dir / "v"), &log), 0)
      << log;
  const auto manifest = io::read_json(dir / "v" / "manifest.json");
  EXPECT_EQ(manifest["accepted"], 3);
  EXPECT_EQ(manifest["seed"], 4);
  EXPECT_TRUE(fs::exists(dir / "v" / "variant_002.json"));

  EXPECT_EQ(run_cli("perturb " + q(dir / "base.json") + " --formula 'G(e1 < 10)' --amplitude 12,20 -n 2 " +
                        "--max-attempts 10 -o " + q(dir / "w"), &log), 3);
  EXPECT_NE(log.find("BudgetExhausted"), std::string::npos) << log;
  EXPECT_FALSE(fs::exists(dir / "w"));

  ASSERT_EQ(run_cli("tiles " + q(dir / "v" / "variant_000.json") + " --width 32 --height 24 -o " + q(dir / "t.json"), &log), 0)
      << log;
  const auto grid = tiles::load_tile_grid(dir / "t.json");
  EXPECT_EQ(grid.width, 32u);
  EXPECT_TRUE(tiles::is_4_connected(tiles::road_mask(grid)));
}

TEST(Pipeline, LoopbackRunProducesConnectedScene) {
  testing_support::ScratchDir dir("cli");
  const auto config = write_pipeline_config(dir.path(), "G(e1 < 10)", 11);
  std::ostringstream out, err;
  ASSERT_EQ(cmd_pipeline(config, {}, out, err), kExitOk) << err.str();
  const auto dump = io::read_json(dir / "run" / "scene.json");
  const auto grid = tiles::tile_grid_from_json(dump);
  EXPECT_GT(grid.road_count(), 0u);
  EXPECT_TRUE(tiles::is_4_connected(tiles::road_mask(grid)));
  EXPECT_EQ(grid, tiles::load_tile_grid(dir / "run" / "tiles.json"));
  ASSERT_EQ(dump["agents"].size(), 1u);
  EXPECT_EQ(dump["agents"][0]["kind"], "car");
  EXPECT_TRUE(fs::exists(dir / "run" / "spline.json"));
  EXPECT_TRUE(fs::exists(dir / "run" / "variants" / "manifest.json"));
  EXPECT_FALSE(fs::exists(dir / ".run.staging"));
}

TEST(Pipeline, SameSeedSameOutputs) {
  testing_support::ScratchDir dir("cli");
  const auto config = write_pipeline_config(dir.path(), "G(e1 < 10)", 12);
  std::string log;
  ASSERT_EQ(run_cli("pipeline " + q(config) + " -o " + q(dir / "a"), &log), 0) << log;
  ASSERT_EQ(run_cli("pipeline " + q(config) + " -o " + q(dir / "b"), &log), 0) << log;
  for (const char* file : {"scene.json", "tiles.json", "spline.json", "variants/manifest.json"}) {
    EXPECT_EQ(io::read_file(dir / "a" / file), io::read_file(dir / "b" / file)) << file;
  }
  ASSERT_EQ(run_cli("pipeline " + q(config) + " --seed 13 -o " + q(dir / "c"), &log), 0) << log;
  EXPECT_NE(io::read_file(dir / "a" / "variants/manifest.json"), io::read_file(dir / "c" / "variants/manifest.json"));
}

TEST(Pipeline, BadSpecFailsFastWithoutOutputs) {
  testing_support::ScratchDir dir("cli");
  const auto config = write_pipeline_config(dir.path(), "G(e1 < ", 1);
  std::string log;
  EXPECT_EQ(run_cli("pipeline " + q(config), &log), 2);
  EXPECT_NE(log.find("SyntaxError"), std::string::npos) << log;
  EXPECT_FALSE(fs::exists(dir / "run"));
  EXPECT_FALSE(fs::exists(dir / ".run.staging"));
}

TEST(Pipeline, UnreachableServerLeavesNothing) {
  testing_support::ScratchDir dir("cli");
  const auto config = write_pipeline_config(dir.path(), "G(e1 < 10)", 1);
  // bind and release a port so nothing listens there
  std::uint16_t port = 0;
  {
    protocol::SceneServer probe({{"127.0.0.1", 0}, protocol::Transport::stream, {}});
    port = probe.port();
  }
  std::string log;
  EXPECT_EQ(run_cli("pipeline " + q(config) + " --endpoint 127.0.0.1:" + std::to_string(port), &log), 3);
  EXPECT_NE(log.find("ConnectionRefused"), std::string::npos) << log;
  EXPECT_FALSE(fs::exists(dir / "run"));
}

TEST(Config, RejectsUnknownAndMistypedKeys) {
  EXPECT_THROW(pipeline_config_from_json(io::Json::parse(R"({"image":"a.pgm","colour":1})"), "."), Error);
  EXPECT_THROW(pipeline_config_from_json(io::Json::parse(R"({"image":"a.pgm","fit":{"n_ctrl":"six"}})"), "."), Error);
  const auto c = pipeline_config_from_json(
      io::Json::parse(R"({"image":"a.pgm","perturb":{"seed":5,"n":0},"transport":"datagram"})"), "/data");
  EXPECT_EQ(c.image, fs::path("/data/a.pgm"));
  EXPECT_EQ(c.perturb.generate.seed, 5u);
  EXPECT_EQ(c.send.transport, protocol::Transport::datagram);
}

TEST(Cli, UsageErrors) {
  std::string log;
  EXPECT_EQ(run_cli("", &log), 2);
  EXPECT_EQ(run_cli("frobnicate", &log), 2);
  EXPECT_EQ(run_cli("--help", &log), 0);
  EXPECT_NE(log.find("pipeline"), std::string::npos);
}

}  // namespace
