#include <benchmark/benchmark.h>

#include "combwalk/fast_walk.hpp"
#include "combwalk/runner.hpp"
#include "combwalk/walk.hpp"

using namespace combwalk;

static void BM_Step(benchmark::State& state) {
  const auto p = Profile::constant(static_cast<double>(state.range(0)));
  RngStream rng(1);
  Vertex v{0, 0};
  for (auto _ : state) {
    v = step(p, v, rng);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step)->Arg(0)->Arg(4)->Arg(1024);

static void BM_Simulate(benchmark::State& state) {
  const auto p = Profile::power(1.0);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(derive_seed(2, i++));
    auto r = simulate(p, {0, 0}, state.range(0), {}, rng);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(1 << 12)->Arg(1 << 16);

static void BM_FastGroupAdvance(benchmark::State& state) {
  const auto p = Profile::power(2.0);
  RngStream base(3);
  FastGroup<2> g(p, {Vertex{0, 0}, Vertex{32, 0}}, {base.split(0), base.split(1)});
  for (auto _ : state) {
    g.advance();
    benchmark::DoNotOptimize(g.time());
  }
  state.counters["sim_steps_per_advance"] =
      benchmark::Counter(static_cast<double>(g.time()) / static_cast<double>(state.iterations()));
}
BENCHMARK(BM_FastGroupAdvance);

static void BM_BlockKernelSample(benchmark::State& state) {
  const auto& bk = BlockKernel::instance();
  RngStream rng(4);
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bk.sample(level, rng));
}
BENCHMARK(BM_BlockKernelSample)->Arg(4)->Arg(16)->Arg(24);

static void BM_CollisionBeforeExitReplica(benchmark::State& state) {
  ExperimentConfig c;
  c.profile = Profile::power(2.0);
  c.estimator = est::CollisionBeforeExit{state.range(0), 4, {}};
  c.horizon = std::int64_t{1} << 50;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replica(c, i++));
}
BENCHMARK(BM_CollisionBeforeExitReplica)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
