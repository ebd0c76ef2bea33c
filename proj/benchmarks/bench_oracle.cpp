#include <benchmark/benchmark.h>

#include "combwalk/oracle.hpp"

using namespace combwalk;

static void BM_ToothCollisionsFloat(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(expected_tooth_collisions(state.range(0), 2));
}
BENCHMARK(BM_ToothCollisionsFloat)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ToothCollisionsRational(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(expected_tooth_collisions(state.range(0), 2, SolveMode::Rational));
}
BENCHMARK(BM_ToothCollisionsRational)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_ExitTime(benchmark::State& state) {
  const auto p = Profile::linlog(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(expected_exit_time(p, {0, 0}, state.range(0)));
}
BENCHMARK(BM_ExitTime)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_KilledKernel(benchmark::State& state) {
  const auto cc = truncated_comb_chain(Profile::constant(4), 16, 100000);
  const auto s = cc.at({0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(killed_kernel(cc.chain, s, state.range(0)));
}
BENCHMARK(BM_KilledKernel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Psi0Bracket(benchmark::State& state) {
  const auto p = Profile::constant(64);
  for (auto _ : state) benchmark::DoNotOptimize(psi0_probability_bracket(p, 0, state.range(0), 1));
}
BENCHMARK(BM_Psi0Bracket)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
