#include <benchmark/benchmark.h>

#include <vector>

#include "wq/bridge.hpp"

namespace {

std::vector<double> uniform_p(int n) {
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
}

}  // namespace

static void BM_BuildCovariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = uniform_p(n);
  for (auto _ : state) {
    auto cov = wq::bridge::build_covariance(p);
    benchmark::DoNotOptimize(cov.eigenvalues(0));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildCovariance)->Arg(10)->Arg(50)->Arg(200)->Complexity();

static void BM_SampleStatistic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto cov = wq::bridge::build_covariance(uniform_p(n));
  for (auto _ : state) {
    auto s = wq::bridge::sample_statistic(cov, 4096, 1, 1);
    benchmark::DoNotOptimize(s.values.back());
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_SampleStatistic)->Arg(10)->Arg(100);

BENCHMARK_MAIN();
