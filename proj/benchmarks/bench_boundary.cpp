#include <benchmark/benchmark.h>

#include "sna/analysis.hpp"
#include "sna/boundary.hpp"
#include "sna/circle.hpp"
#include "sna/systems.hpp"

namespace {

const sna::PinchedSystem& tanh5() {
  static const sna::PinchedSystem sys =
      sna::make_system(sna::tanh_family(5.0), sna::golden_mean());
  return sys;
}

void BM_boundary_value(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double theta = 0.1234;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sna::boundary_value(tanh5(), theta, n));
    theta = sna::wrap01(theta + 0.001);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_boundary_value)->Arg(8)->Arg(32)->Arg(128)->Complexity(benchmark::oN);

void BM_boundary_line(benchmark::State& state) {
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::boundary_line(tanh5(), 20, grid));
  state.SetItemsProcessed(state.iterations() * grid);
}
BENCHMARK(BM_boundary_line)->Arg(1024)->Arg(8192);

void BM_upper_bounding_graph(benchmark::State& state) {
  const sna::PinchedSystem sys =
      sna::make_system(sna::tanh_family(32.0), sna::golden_mean());
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::upper_bounding_graph(sys, grid, 400, 1e-6));
}
BENCHMARK(BM_upper_bounding_graph)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_lyapunov_on_graph(benchmark::State& state) {
  const sna::PinchedSystem sys =
      sna::make_system(sna::tanh_family(32.0), sna::golden_mean());
  const sna::AttractorResult res = sna::upper_bounding_graph(sys, 20000, 400, 1e-6);
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::lyapunov_on_graph(sys, res.phi, 20000));
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_lyapunov_on_graph)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
