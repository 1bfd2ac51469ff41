#include <benchmark/benchmark.h>

#include "sna/counterexample.hpp"

namespace {

const sna::GFunction& ladder() {
  static const sna::GFunction g = sna::build_g(sna::CounterexampleSpec{"squares", 3.0, 25});
  return g;
}

void BM_build_g(benchmark::State& state) {
  const sna::CounterexampleSpec spec{"squares", 3.0, static_cast<int>(state.range(0))};
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::build_g(spec));
}
BENCHMARK(BM_build_g)->Arg(10)->Arg(25);

void BM_g_eval(benchmark::State& state) {
  const sna::GFunction& g = ladder();
  double theta = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.eval(theta));
    theta = theta < 0.02 ? theta + 1e-5 : 0.001;  // sweep across the rung ladder
  }
}
BENCHMARK(BM_g_eval);

void BM_g_log_eval(benchmark::State& state) {
  const sna::GFunction& g = ladder();
  double theta = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.log_eval(theta));
    theta = theta < 0.02 ? theta + 1e-5 : 0.001;
  }
}
BENCHMARK(BM_g_log_eval);

void BM_abs_log_integral(benchmark::State& state) {
  const sna::GFunction& g = ladder();
  for (auto _ : state)
    benchmark::DoNotOptimize(g.abs_log_integral());
}
BENCHMARK(BM_abs_log_integral);

void BM_verify_claim1(benchmark::State& state) {
  const sna::GFunction& g = ladder();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::verify_claim1(g, n));
  state.SetComplexityN(n);
}
BENCHMARK(BM_verify_claim1)->Arg(100)->Arg(500)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMicrosecond);

}  // namespace
