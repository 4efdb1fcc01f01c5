#include <benchmark/benchmark.h>

#include "shelf/generate.hpp"
#include "shelf/occupancy.hpp"
#include "shelf/simulator.hpp"

using namespace shelf;

namespace {

Scene scene_for(int n) {
  GenerationConfig cfg;
  cfg.n_objects = n;
  return sample_scene(cfg, 1000 + static_cast<std::uint64_t>(n));
}

const PlacementGrid& grid() {
  static const PlacementGrid g = PlacementGrid::for_shelf(ShelfConfig{});
  return g;
}

void hybrid(benchmark::State& state, Exec exec) {
  const Scene s = scene_for(static_cast<int>(state.range(0)));
  const auto t = TargetSpec::make(AspectRatio::Cube);
  for (auto _ : state) benchmark::DoNotOptimize(hidden_placements(s, t, grid(), exec));
}

void exhaustive(benchmark::State& state, Exec exec) {
  const Scene s = scene_for(static_cast<int>(state.range(0)));
  const auto t = TargetSpec::make(AspectRatio::Cube);
  for (auto _ : state) benchmark::DoNotOptimize(hidden_placements_exhaustive(s, t, grid(), exec));
}

void render(benchmark::State& state, Exec exec) {
  const Scene s = scene_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_depth(s, exec));
}

}  // namespace

BENCHMARK_CAPTURE(hybrid, serial, Exec::Serial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(hybrid, parallel, Exec::Parallel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(exhaustive, serial, Exec::Serial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(exhaustive, parallel, Exec::Parallel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(render, serial, Exec::Serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(render, parallel, Exec::Parallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
