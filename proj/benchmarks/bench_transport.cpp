#include <benchmark/benchmark.h>

#include <vector>

#include "wq/measures.hpp"
#include "wq/rng.hpp"
#include "wq/transport.hpp"

using namespace wq;

namespace {

measures::FiniteMeasure2D random_grid(int n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> p(static_cast<std::size_t>(n) * n);
  double s = 0.0;
  for (auto& v : p) s += (v = rng.next_open());
  for (auto& v : p) v /= s;
  return measures::FiniteMeasure2D(measures::Grid1D(n), measures::Grid1D(n),
                                   measures::renormalized(p));
}

}  // namespace

static void BM_W1GridLp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto P = random_grid(n, 1);
  const auto Q = random_grid(n, 2);
  for (auto _ : state) {
    auto res = transport::w1_grid_lp(P, Q);
    benchmark::DoNotOptimize(res.distance);
  }
  state.SetComplexityN(n * n);
}
BENCHMARK(BM_W1GridLp)->Arg(3)->Arg(5)->Arg(8)->Arg(12)->Complexity();

static void BM_W1LineEmpirical(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  RngStream rng(7, 0);
  const measures::MixtureMeasure P(0.3);
  const auto batch = measures::sample(P, N, rng);
  const auto emp = measures::empirical_measure(batch);
  const auto curve_p = transport::make_cdf_curve(emp);
  const auto curve_q = transport::make_cdf_curve(P);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transport::w1_1d(curve_p, curve_q));
  }
  state.SetComplexityN(N);
}
BENCHMARK(BM_W1LineEmpirical)->Range(256, 1 << 16)->Complexity();
