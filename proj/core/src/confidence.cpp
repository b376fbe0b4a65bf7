#include "wq/confidence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wq/parallel.hpp"
#include "wq/rng.hpp"
#include "wq/stats.hpp"
#include "wq/transport.hpp"

namespace wq::confidence {

double radius_k(double alpha) {
  if (alpha == 1.0)
    throw std::invalid_argument("radius_k: alpha = 1 gives an infinite radius");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("radius_k: alpha outside [0,1)");
  if (alpha == 0.0) return 0.0;
  return 0.5 * stats::inverse_normal_cdf(0.5 * (1.0 + alpha));
}

double normal_tail_2m2phi(double t) {
  if (t < 0.0) throw std::invalid_argument("normal_tail_2m2phi: t < 0");
  // 2 - 2 Phi(2t) in cancellation-free form
  return std::erfc(t * 1.4142135623730951);
}

ConfidenceRegion make_region(const measures::SampleBatch& batch, double alpha) {
  if (batch.draws.empty())
    throw std::invalid_argument("make_region: empty batch");
  const int N = static_cast<int>(batch.draws.size());
  const double k = radius_k(alpha);
  return {measures::empirical_measure(batch), k / std::sqrt(N), alpha, k, N};
}

ContainmentResult region_contains(const measures::SampleBatch& batch,
                                  const measures::Measure1D& candidate,
                                  double alpha) {
  const ConfidenceRegion region = make_region(batch, alpha);
  const double dist =
      transport::w1_1d(transport::make_cdf_curve(region.center),
                       transport::make_cdf_curve(candidate));
  return {dist <= region.radius, region.radius - dist, dist, region.radius};
}

CoverageResult coverage_sim(const measures::Measure1D& P, int N, double alpha,
                            int reps, std::uint64_t seed, int threads) {
  if (reps < 100) throw std::invalid_argument("coverage_sim: reps must be >= 100");
  if (N < 1) throw std::invalid_argument("coverage_sim: N < 1");
  const double radius = radius_k(alpha) / std::sqrt(static_cast<double>(N));
  const transport::CdfCurve truth = transport::make_cdf_curve(P);

  std::atomic<std::int64_t> hits{0};
  parallel_for(0, reps, threads, [&](std::int64_t lo, std::int64_t hi) {
    std::int64_t local = 0;
    for (std::int64_t r = lo; r < hi; ++r) {
      RngStream rng(seed, static_cast<std::uint64_t>(r));
      const auto batch = measures::sample(P, N, rng);
      const auto emp = measures::empirical_measure(batch);
      const double dist =
          transport::w1_1d(transport::make_cdf_curve(emp), truth);
      if (dist <= radius) ++local;
    }
    hits += local;
  });

  const auto ci = stats::wilson_interval(hits.load(), reps, 0.99);
  return {static_cast<double>(hits.load()) / reps, ci.lo, ci.hi, reps,
          alpha < 0.7};
}

double eval_lipschitz(const LipschitzTable& f, double x) {
  if (f.xs.empty()) throw std::invalid_argument("eval_lipschitz: empty table");
  if (x <= f.xs.front()) return f.ys.front();
  if (x >= f.xs.back()) return f.ys.back();
  const auto it = std::upper_bound(f.xs.begin(), f.xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - f.xs.begin());
  const double w = (x - f.xs[j - 1]) / (f.xs[j] - f.xs[j - 1]);
  return f.ys[j - 1] + w * (f.ys[j] - f.ys[j - 1]);
}

MeanInterval lipschitz_mean_bounds(const measures::SampleBatch& batch,
                                   const LipschitzTable& f, double alpha) {
  if (batch.draws.empty())
    throw std::invalid_argument("lipschitz_mean_bounds: empty batch");
  if (f.xs.size() != f.ys.size() || f.xs.size() < 2)
    throw std::invalid_argument("lipschitz_mean_bounds: bad table");
  for (std::size_t j = 0; j + 1 < f.xs.size(); ++j) {
    if (!(f.xs[j + 1] > f.xs[j]))
      throw std::invalid_argument(
          "lipschitz_mean_bounds: breakpoints not ascending");
    if (std::abs(f.ys[j + 1] - f.ys[j]) >
        std::abs(f.xs[j + 1] - f.xs[j]) + 1e-12)
      throw std::invalid_argument(
          "lipschitz_mean_bounds: |f(" + std::to_string(f.xs[j + 1]) +
          ") - f(" + std::to_string(f.xs[j]) +
          ")| exceeds the breakpoint spacing; not 1-Lipschitz");
  }
  const int N = static_cast<int>(batch.draws.size());
  double mean = 0.0;
  for (double x : batch.draws) mean += eval_lipschitz(f, x);
  mean /= static_cast<double>(N);
  const double halfwidth = radius_k(alpha) / std::sqrt(static_cast<double>(N));
  return {mean - halfwidth, mean + halfwidth, mean, halfwidth, true};
}

}  // namespace wq::confidence
