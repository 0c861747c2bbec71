#include <benchmark/benchmark.h>

#include <vector>

#include "instances.hpp"
#include "lp_oracle.hpp"
#include "mcft/colgen.hpp"
#include "mcft/io.hpp"
#include "mcft/tracker.hpp"

namespace {

void BM_SolveLp(benchmark::State& state) {
  std::vector<mcft::LpProblem> problems;
  for (std::uint64_t s = 0; s < 64; ++s) {
    problems.push_back(mcft::testing::random_rmlp(s, static_cast<int>(state.range(0)), 10));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcft::solve_lp(problems[i++ % problems.size()]));
  }
}
BENCHMARK(BM_SolveLp)->Arg(20)->Arg(80);

mcft::testing::InstanceLimits window_limits(int detections) {
  mcft::testing::InstanceLimits lim;
  lim.max_detections = detections;
  lim.max_frames = 10;
  lim.max_tracked = 6;
  lim.transition_prob = 0.3;
  return lim;
}

void BM_Pricing(benchmark::State& state) {
  const auto inst = mcft::testing::random_instance(7, window_limits(static_cast<int>(state.range(0))));
  const std::vector<double> pi(inst.network.num_shared_edges(), 0.0);
  for (auto _ : state) {
    for (const auto& c : inst.costs) benchmark::DoNotOptimize(mcft::price(inst.network, c, pi));
  }
}
BENCHMARK(BM_Pricing)->Arg(20)->Arg(60);

void BM_ColumnGeneration(benchmark::State& state) {
  const auto inst = mcft::testing::random_instance(11, window_limits(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcft::column_generation(inst.network, inst.costs));
  }
}
BENCHMARK(BM_ColumnGeneration)->Arg(20)->Arg(60);

void BM_TrackerRun(benchmark::State& state) {
  mcft::io::Scenario s;
  s.targets = 5;
  s.frames = 40;
  s.lane_spacing = 90;
  const auto scene = mcft::io::synth_generate(s, 1);
  mcft::TrackerConfig c;
  c.window_length = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcft::run(scene.detections, c));
  }
  state.SetItemsProcessed(state.iterations() * s.frames);
}
BENCHMARK(BM_TrackerRun)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
