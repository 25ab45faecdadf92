// Walks one road through the library: fit a spline to a few waypoints,
// draw STL-filtered variants, and print the tile grid of the first one.

#include <cstdio>
#include <iostream>

#include "roadscene/geometry/fit.hpp"
#include "roadscene/perturb/variants.hpp"
#include "roadscene/stl/parser.hpp"
#include "roadscene/tiles/raster.hpp"
#include "roadscene/tiles/tile_grid.hpp"

int main() {
  using namespace roadscene;

  const std::vector<geometry::Point2> waypoints{{0, 40}, {20, 42}, {40, 30}, {60, 12},
                                                {80, 10}, {100, 22}, {120, 30}};
  const auto base = geometry::fit_spline(waypoints, 5).spline;

  const auto spec = stl::parse("G(e1 < 4) & G(d1 < 4)");
  perturb::SinusoidRanges ranges;
  ranges.amplitude = {0.0, 6.0};
  perturb::GenerateOptions options;
  options.n = 3;
  options.seed = 2024;
  options.max_attempts = 200;

  const auto batch = perturb::sample_variants(base, spec, ranges, options);
  std::printf("accepted %zu of %zu attempts\n", batch.accepted.size(), batch.attempts);
  for (const auto& v : batch.accepted) {
    std::printf("  attempt %3zu  robustness %+.3f  max deviation %.3f px\n", v.attempt, v.verdict.robustness,
                perturb::max_deviation(base, v.spline));
  }
  if (batch.accepted.empty()) return 1;

  tiles::RasterParams raster;
  raster.grid_width = 48;
  raster.grid_height = 20;
  const auto grid = tiles::synthesize(tiles::rasterize(batch.accepted.front().spline, raster));

  // one glyph per code: end caps, straights, corners, tees and the cross
  static const char* glyphs[16] = {"o", "╵", "╶", "└", "╷", "│", "┌", "├", "╴", "┘", "─", "┴", "┐", "┤", "┬", "┼"};
  for (std::size_t y = 0; y < grid.height; ++y) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      const int code = grid.at(x, y);
      std::cout << (code == tiles::kEmpty ? " " : glyphs[code]);
    }
    std::cout << '\n';
  }
  return 0;
}
