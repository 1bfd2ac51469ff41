#include <benchmark/benchmark.h>

#include "sna/circle.hpp"

namespace {

void BM_orbit_point(benchmark::State& state) {
  const double w = sna::golden_mean();
  long long k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sna::orbit_point(w, k));
    k = (k % 1000000) + 1;
  }
}
BENCHMARK(BM_orbit_point);

void BM_cf_from_rule(benchmark::State& state) {
  const sna::CoeffRule rule = sna::coeff_rule("squares");
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::cf_from_rule(rule, depth));
}
BENCHMARK(BM_cf_from_rule)->Arg(10)->Arg(29);

void BM_sigma_tail(benchmark::State& state) {
  const sna::ContinuedFraction cf = sna::cf_from_rule(sna::coeff_rule("squares"), 29);
  for (auto _ : state)
    benchmark::DoNotOptimize(cf.sigma(8));  // past the direct-product horizon
}
BENCHMARK(BM_sigma_tail);

void BM_first_entry_time(benchmark::State& state) {
  const sna::ContinuedFraction cf = sna::cf_expand(sna::golden_mean(), 25);
  const int n = static_cast<int>(state.range(0));
  const double radius = std::fabs(cf.sigma(n));
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::first_entry_time(cf.omega, 0.0, radius));
  state.SetComplexityN(cf.q_i64(n));
}
BENCHMARK(BM_first_entry_time)->Arg(10)->Arg(15)->Arg(20)->Complexity(benchmark::oN);

void BM_diophantine_fit(benchmark::State& state) {
  const long horizon = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sna::diophantine_fit(sna::golden_mean(), horizon));
  state.SetComplexityN(horizon);
}
BENCHMARK(BM_diophantine_fit)->Arg(10000)->Arg(100000)->Complexity(benchmark::oN)
    ->Unit(benchmark::kMicrosecond);

}  // namespace
