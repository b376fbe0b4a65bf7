#include "wq/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wq/measures.hpp"
#include "wq/parallel.hpp"
#include "wq/rng.hpp"
#include "wq/stats.hpp"

namespace wq::quantiles {

QuantileEstimate quantile_of_sorted(std::span<const double> sorted,
                                    double alpha) {
  if (sorted.empty())
    throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("empirical_quantile: alpha outside [0,1]");
  const int M = static_cast<int>(sorted.size());
  QuantileEstimate est;
  est.alpha = alpha;
  est.M = M;
  if (alpha == 0.0) {
    est.value = sorted.front();
    est.ci_lo = est.ci_hi = sorted.front();
    est.min_flag = true;
    return est;
  }
  const int k = std::clamp(
      static_cast<int>(std::ceil(alpha * static_cast<double>(M))), 1, M);
  est.value = sorted[static_cast<std::size_t>(k) - 1];
  const auto bracket = stats::quantile_rank_bracket(M, alpha, 0.99);
  est.ci_lo = sorted[static_cast<std::size_t>(bracket.lo) - 1];
  est.ci_hi = sorted[static_cast<std::size_t>(bracket.hi) - 1];
  return est;
}

QuantileEstimate empirical_quantile(const bridge::DistanceSample& sample,
                                    double alpha) {
  std::vector<double> sorted(sample.values);
  std::sort(sorted.begin(), sorted.end());
  return quantile_of_sorted(sorted, alpha);
}

std::vector<double> mixture_pvector(double lambda, int n) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mixture_pvector: lambda outside [0,1]");
  if (n < 2) throw std::invalid_argument("mixture_pvector: n < 2");
  const double interior = (1.0 - lambda) / static_cast<double>(n);
  std::vector<double> p(static_cast<std::size_t>(n), interior);
  const double endpoint = 0.5 * (1.0 - static_cast<double>(n - 2) * interior);
  p.front() = endpoint;
  p.back() = endpoint;
  // endpoints absorb rounding until the sum is exactly 1
  for (int pass = 0; pass < 4; ++pass) {
    double total = 0.0;
    for (double v : p) total += v;
    if (total == 1.0) break;
    p.back() += 1.0 - total;
  }
  return p;
}

namespace {

constexpr int kChunk = 2048;

// Monte Carlo values of the statistic for several factors sharing the same
// standard-normal draws (common random numbers): replicate r always consumes
// stream (seed, r), and every factor sees the same Z rows.
std::vector<std::vector<double>> crn_values(
    const std::vector<Eigen::MatrixXd>& factors, int n, int M,
    std::uint64_t seed, int threads) {
  const int d = n - 1;
  const double inv = 1.0 / static_cast<double>(n - 1);
  std::vector<std::vector<double>> values(
      factors.size(), std::vector<double>(static_cast<std::size_t>(M)));
  parallel_for(0, M, threads, [&](std::int64_t lo, std::int64_t hi) {
    Eigen::MatrixXd Z(kChunk, d);
    for (std::int64_t base = lo; base < hi; base += kChunk) {
      const int c = static_cast<int>(std::min<std::int64_t>(kChunk, hi - base));
      for (int r = 0; r < c; ++r) {
        RngStream rng(seed, static_cast<std::uint64_t>(base + r));
        for (int j = 0; j < d; ++j) Z(r, j) = rng.next_normal();
      }
      for (std::size_t f = 0; f < factors.size(); ++f) {
        const Eigen::MatrixXd V = Z.topRows(c) * factors[f].transpose();
        for (int r = 0; r < c; ++r)
          values[f][static_cast<std::size_t>(base + r)] =
              V.row(r).cwiseAbs().sum() * inv;
      }
    }
  });
  return values;
}

double bracket_se(const QuantileEstimate& est) {
  // 99% bracket width converted to a standard-error scale
  const double z99 = stats::inverse_normal_cdf(0.995);
  return (est.ci_hi - est.ci_lo) / (2.0 * z99);
}

}  // namespace

LambdaCurve lambda_curve(int n, std::span<const double> alphas,
                         std::span<const double> lambda_grid, int M,
                         std::uint64_t seed, int threads) {
  if (alphas.empty() || lambda_grid.empty())
    throw std::invalid_argument("lambda_curve: empty grid");
  if (M < 1) throw std::invalid_argument("lambda_curve: M < 1");
  for (double l : lambda_grid)
    if (!(l >= 0.0 && l <= 1.0))
      throw std::invalid_argument("lambda_curve: lambda outside [0,1]");

  LambdaCurve curve;
  curve.alphas.assign(alphas.begin(), alphas.end());
  curve.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  const std::size_t na = alphas.size();
  curve.lambda_hat.assign(na, 0.0);
  curve.quantile_at_max.assign(na, 0.0);
  curve.ci_lo.assign(na, 0.0);
  curve.ci_hi.assign(na, 0.0);
  std::vector<bool> assigned(na, false);

  // lambda batches bound the values buffer at ~32M doubles
  const std::size_t batch =
      std::max<std::size_t>(1, 33554432 / static_cast<std::size_t>(M));
  for (std::size_t b0 = 0; b0 < lambda_grid.size(); b0 += batch) {
    const std::size_t b1 = std::min(lambda_grid.size(), b0 + batch);
    std::vector<Eigen::MatrixXd> factors;
    factors.reserve(b1 - b0);
    for (std::size_t f = b0; f < b1; ++f)
      factors.push_back(
          bridge::build_covariance(mixture_pvector(lambda_grid[f], n)).chol);

    auto values = crn_values(factors, n, M, seed, threads);
    parallel_for(0, static_cast<std::int64_t>(values.size()), threads,
                 [&](std::int64_t lo, std::int64_t hi) {
                   for (std::int64_t f = lo; f < hi; ++f)
                     std::sort(values[f].begin(), values[f].end());
                 });

    for (std::size_t f = 0; f < values.size(); ++f) {
      const double lam = lambda_grid[b0 + f];
      for (std::size_t a = 0; a < na; ++a) {
        const auto est = quantile_of_sorted(values[f], alphas[a]);
        // ties break toward smaller lambda: strict improvement only
        if (!assigned[a] || est.value > curve.quantile_at_max[a]) {
          assigned[a] = true;
          curve.lambda_hat[a] = lam;
          curve.quantile_at_max[a] = est.value;
          curve.ci_lo[a] = est.ci_lo;
          curve.ci_hi[a] = est.ci_hi;
        }
      }
    }
  }
  return curve;
}

SymmetryGain symmetry_gain(std::span<const double> p, double alpha, int M,
                           std::uint64_t seed, int threads) {
  measures::ensure_probability_vector(p);
  const int n = static_cast<int>(p.size());
  if (n < 2) throw std::invalid_argument("symmetry_gain: need n >= 2");

  std::vector<double> sym(p.begin(), p.end());
  const double ends = 0.5 * (p.front() + p.back());
  sym.front() = ends;
  sym.back() = ends;
  if (n > 2) {
    double interior = 0.0;
    for (int i = 1; i + 1 < n; ++i) interior += p[i];
    const double each = interior / static_cast<double>(n - 2);
    for (int i = 1; i + 1 < n; ++i) sym[i] = each;
  }

  std::vector<Eigen::MatrixXd> factors = {
      bridge::build_covariance(p).chol,
      bridge::build_covariance(sym).chol,
  };
  auto values = crn_values(factors, n, M, seed, threads);
  std::sort(values[0].begin(), values[0].end());
  std::sort(values[1].begin(), values[1].end());
  const auto orig = quantile_of_sorted(values[0], alpha);
  const auto symq = quantile_of_sorted(values[1], alpha);

  SymmetryGain out;
  out.quantile_original = orig.value;
  out.quantile_symmetrized = symq.value;
  out.gain = symq.value - orig.value;
  out.joint_se = std::hypot(bracket_se(orig), bracket_se(symq));
  return out;
}

ShortfallEstimate dominance_integral(std::span<const double> p, double K, int M,
                                     std::uint64_t seed, int threads) {
  if (K < 0.0) throw std::invalid_argument("dominance_integral: K < 0");
  const auto cov = bridge::build_covariance(p);
  const auto sample = bridge::sample_statistic(cov, M, seed, threads);
  std::vector<double> shortfall(sample.values.size());
  for (std::size_t i = 0; i < shortfall.size(); ++i)
    shortfall[i] = std::max(sample.values[i] - K, 0.0);
  const auto ms = stats::mean_and_se(shortfall);
  return {ms.mean, ms.se};
}

}  // namespace wq::quantiles
