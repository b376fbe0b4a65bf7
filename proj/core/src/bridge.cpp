#include "wq/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wq/measures.hpp"
#include "wq/parallel.hpp"
#include "wq/rng.hpp"
#include "wq/stats.hpp"

namespace wq::bridge {

namespace {

// Lower-triangular Cholesky of sigma + jitter*I with a relative pivot floor.
// Returns the index of the failing leading minor, or -1 on success.
int try_cholesky(const Eigen::MatrixXd& sigma, double jitter,
                 Eigen::MatrixXd& L) {
  const int d = static_cast<int>(sigma.rows());
  L.setZero(d, d);
  for (int k = 0; k < d; ++k) {
    double s = sigma(k, k) + jitter;
    for (int t = 0; t < k; ++t) s -= L(k, t) * L(k, t);
    const double floor = 1e-12 * (sigma(k, k) + jitter) + 1e-300;
    if (s < floor) return k;
    L(k, k) = std::sqrt(s);
    for (int r = k + 1; r < d; ++r) {
      double v = sigma(r, k) + (r == k ? jitter : 0.0);
      for (int t = 0; t < k; ++t) v -= L(r, t) * L(k, t);
      L(r, k) = v / L(k, k);
    }
  }
  return -1;
}

}  // namespace

BridgeCovariance build_covariance(std::span<const double> p) {
  BridgeCovariance cov;
  cov.n = static_cast<int>(p.size());
  cov.q = measures::cumulative_q(p);
  const int d = cov.n - 1;

  cov.sigma.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double v = cov.q[i] * (1.0 - cov.q[j]);
      cov.sigma(i, j) = v;
      cov.sigma(j, i) = v;
    }

  // jitter ladder, then spectral fallback for the positive-rank block
  int fail_minor = -1;
  bool factored = false;
  for (double jitter : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    fail_minor = try_cholesky(cov.sigma, jitter, cov.chol);
    if (fail_minor < 0) {
      cov.jitter = jitter;
      factored = true;
      break;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.sigma);
  if (es.info() != Eigen::Success)
    throw std::logic_error("build_covariance: eigen decomposition failed");
  cov.eigenvalues = es.eigenvalues().reverse();

  // residual check ||sigma v - a v|| <= 1e-10 ||sigma||
  const double scale = std::max(cov.eigenvalues.cwiseAbs().maxCoeff(), 1e-30);
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    const double resid = (cov.sigma * v - es.eigenvalues()(i) * v).norm();
    if (resid > 1e-10 * scale)
      throw std::logic_error("build_covariance: eigen residual too large");
  }
  for (int i = 0; i < d; ++i) {
    if (cov.eigenvalues(i) < -1e-10 * scale)
      throw std::logic_error("build_covariance: negative eigenvalue");
    cov.eigenvalues(i) = std::max(cov.eigenvalues(i), 0.0);
  }

  if (!factored) {
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw std::logic_error(
          "build_covariance: Cholesky failed after maximal jitter; leading "
          "minor of order " +
          std::to_string(fail_minor + 1) + " is not positive definite");
    Eigen::VectorXd asc = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    cov.chol = es.eigenvectors() * asc.asDiagonal();
    cov.spectral_factor = true;
    cov.jitter = 0.0;
  }
  return cov;
}

namespace {

constexpr int kGemmBlock = 512;

// Fills values[r] for r in [lo, hi) with the statistic of replicate r.
void sample_block(const BridgeCovariance& cov, std::uint64_t seed,
                  std::int64_t lo, std::int64_t hi, std::vector<double>& values) {
  const int d = cov.n - 1;
  const double inv = 1.0 / static_cast<double>(cov.n - 1);
  Eigen::MatrixXd Z(kGemmBlock, d);
  for (std::int64_t base = lo; base < hi; base += kGemmBlock) {
    const int c = static_cast<int>(std::min<std::int64_t>(kGemmBlock, hi - base));
    for (int r = 0; r < c; ++r) {
      RngStream rng(seed, static_cast<std::uint64_t>(base + r));
      for (int j = 0; j < d; ++j) Z(r, j) = rng.next_normal();
    }
    const Eigen::MatrixXd V =
        Z.topRows(c) * cov.chol.transpose();  // row r ~ N(0, sigma)
    for (int r = 0; r < c; ++r)
      values[static_cast<std::size_t>(base + r)] = V.row(r).cwiseAbs().sum() * inv;
  }
}

}  // namespace

DistanceSample sample_statistic(const BridgeCovariance& cov, int M,
                                std::uint64_t seed, int threads) {
  if (M < 1) throw std::invalid_argument("sample_statistic: M < 1");
  DistanceSample out;
  out.M = M;
  out.seed = seed;
  out.statistic_id = "bridge_l1_mean/n=" + std::to_string(cov.n);
  out.values.resize(static_cast<std::size_t>(M));
  parallel_for(0, M, threads, [&](std::int64_t lo, std::int64_t hi) {
    sample_block(cov, seed, lo, hi, out.values);
  });
  return out;
}

std::vector<McCdfPoint> mc_cdf(std::span<const double> p,
                               std::span<const double> t_grid, int M,
                               std::uint64_t seed, int threads) {
  if (M < 100) throw std::invalid_argument("mc_cdf: M must be >= 100");
  if (t_grid.empty()) throw std::invalid_argument("mc_cdf: empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0)
      throw std::invalid_argument("mc_cdf: negative t");
    if (i > 0 && t_grid[i] < t_grid[i - 1])
      throw std::invalid_argument("mc_cdf: t grid not ascending");
  }
  const BridgeCovariance cov = build_covariance(p);
  DistanceSample sample = sample_statistic(cov, M, seed, threads);
  std::sort(sample.values.begin(), sample.values.end());

  std::vector<McCdfPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const auto count = std::upper_bound(sample.values.begin(),
                                        sample.values.end(), t) -
                       sample.values.begin();
    const auto ci = stats::wilson_interval(count, M, 0.99);
    out.push_back({t, static_cast<double>(count) / M, ci.lo, ci.hi});
  }
  return out;
}

MeanEstimate limit_statistic_uniform_mean(int M, int fine_n, std::uint64_t seed,
                                          int threads) {
  if (fine_n < 2)
    throw std::invalid_argument("limit_statistic_uniform_mean: fine_n < 2");
  if (M < 1) throw std::invalid_argument("limit_statistic_uniform_mean: M < 1");
  const std::vector<double> p(static_cast<std::size_t>(fine_n),
                              1.0 / static_cast<double>(fine_n));
  const BridgeCovariance cov = build_covariance(p);
  const DistanceSample sample = sample_statistic(cov, M, seed, threads);
  const auto ms = stats::mean_and_se(sample.values);
  return {ms.mean, ms.se};
}

double eigen_tail(const BridgeCovariance& cov, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("eigen_tail: t must be > 0");
  const int d = cov.n - 1;
  const double a1 = cov.eigenvalues(0);
  if (a1 <= 0.0)
    throw std::invalid_argument(
        "eigen_tail: top eigenvalue is zero (point-mass measure)");
  int m = 0;
  while (m < d && (a1 - cov.eigenvalues(m)) < 1e-8 * a1) ++m;

  double log_val = (1.0 - 0.5 * m) * std::log(2.0) - std::lgamma(0.5 * m) -
                   0.5 * t + (0.5 * m - 1.0) * std::log(t);
  for (int j = m; j < d; ++j)
    log_val -= 0.5 * std::log1p(-cov.eigenvalues(j) / a1);
  return std::exp(log_val);
}

double l1_tail_bound(const BridgeCovariance& cov, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("l1_tail_bound: t must be > 0");
  const double a1 = cov.eigenvalues(0);
  if (a1 <= 0.0)
    throw std::invalid_argument(
        "l1_tail_bound: top eigenvalue is zero (point-mass measure)");
  const double threshold = t * t * static_cast<double>(cov.n - 1) / a1;
  return eigen_tail(cov, threshold);
}

double l1_tail_bound(std::span<const double> p, double t) {
  return l1_tail_bound(build_covariance(p), t);
}

}  // namespace wq::bridge
