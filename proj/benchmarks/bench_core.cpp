#include <benchmark/benchmark.h>

#include "duocarry/elevation.hpp"
#include "duocarry/env.hpp"
#include "duocarry/random.hpp"
#include "duocarry/system_sim.hpp"
#include "duocarry/terrain.hpp"
#include "duocarry/waypoint_graph.hpp"

namespace {

using namespace duocarry;

const Scenario& boxes() {
  static const Scenario s = makeScenario(ScenarioKind::Boxes);
  return s;
}

void BM_SimulatorStep(benchmark::State& state) {
  Simulator sim(boxes().terrain, SimConfig{});
  sim.reset(boxes().start);
  Rng rng(1);
  Action a{};
  for (auto _ : state) {
    for (auto& v : a) v = rng.uniform(-0.2, 0.2);
    benchmark::DoNotOptimize(sim.step(a));
  }
}
BENCHMARK(BM_SimulatorStep);

void BM_Sense(benchmark::State& state) {
  const Pose2 pose{{1.5, -1.0}, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(sense(boxes().terrain, pose, 0.0));
}
BENCHMARK(BM_Sense)->Unit(benchmark::kMillisecond);

void BM_MaxFilter(benchmark::State& state) {
  const HeightMap m = sense(boxes().terrain, Pose2{{1.5, -1.0}, 0.3}, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(maxFilter(m));
}
BENCHMARK(BM_MaxFilter)->Unit(benchmark::kMillisecond);

void BM_Fuse(benchmark::State& state) {
  const HeightMap m1 = maxFilter(sense(boxes().terrain, Pose2{{1.5, -1.0}, 0.0}, 0.0));
  const HeightMap m2 = maxFilter(sense(boxes().terrain, Pose2{{1.5, 1.0}, 0.0}, 0.0));
  const Pose2 frame{{1.5, 0.0}, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(fuse(m1, m2, frame));
}
BENCHMARK(BM_Fuse)->Unit(benchmark::kMicrosecond);

void BM_EnvironmentStep(benchmark::State& state) {
  EpisodeConfig cfg;
  cfg.path.waypoints = boxes().waypoints;
  cfg.max_steps = 1 << 30;
  Environment env(boxes().terrain, cfg);
  Observation obs = env.reset(boxes().start);
  for (auto _ : state) {
    const StepResult r = env.step(heuristicTracker(obs));
    obs = r.observation;
    if (r.termination) {
      state.PauseTiming();
      obs = env.reset(boxes().start);
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_EnvironmentStep)->Unit(benchmark::kMillisecond);

void BM_Dijkstra(benchmark::State& state) {
  Subterrain sub;
  sub.bounds = {Vec2{0.0, 0.0}, Vec2{12.0, 12.0}};
  const Terrain t(sub.bounds, {sub});
  GraphSamplingConfig cfg;
  cfg.n_points = static_cast<int>(state.range(0));
  const FreeSpaceGraph g = sampleGraph(t, t.bounds(), cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dijkstra(g.edges, 0));
}
BENCHMARK(BM_Dijkstra)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
