#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wq::bridge {

/// Discretized Brownian-bridge covariance for a probability vector p:
/// sigma_ij = q_i (1 - q_j) for i <= j, with q the cumulative vector.
struct BridgeCovariance {
  int n = 0;                    // grid size; matrices have dimension n-1
  std::vector<double> q;        // cumulative probabilities, length n-1
  Eigen::MatrixXd sigma;        // exact covariance (never jittered)
  Eigen::MatrixXd chol;         // factor L with L L^T = sigma + jitter*I
  Eigen::VectorXd eigenvalues;  // descending, clamped at zero
  double jitter = 0.0;          // diagonal jitter the factorization needed
  bool spectral_factor = false; // true if chol is the eigen-based fallback
};

/// Builds sigma, its (possibly jittered) Cholesky factor and eigenvalues.
/// Rank-deficient sigma (zero p entries, in particular the extremal measure)
/// is handled by jitter escalation 1e-14 -> 1e-8; if the ladder fails, a
/// spectral factorization of the positive-rank block is used, and an input
/// that is not positive semidefinite within 1e-8 raises an error naming the
/// offending leading minor.
BridgeCovariance build_covariance(std::span<const double> p);

/// Monte Carlo sample of a distance statistic with seed provenance.
struct DistanceSample {
  std::vector<double> values;
  int M = 0;
  std::uint64_t seed = 0;
  std::string statistic_id;
};

/// M replicates of the statistic sum_i |B(q_i)| / (n-1), each realized as
/// the l1 norm of L*z divided by n-1 (z standard normal). Replicate r always
/// uses stream (seed, r), so the result is thread-count independent.
DistanceSample sample_statistic(const BridgeCovariance& cov, int M,
                                std::uint64_t seed, int threads = 0);

struct McCdfPoint {
  double t;
  double f_hat;
  double ci_lo;
  double ci_hi;
};

/// Monte Carlo CDF estimate of the statistic over the whole t grid from one
/// shared draw set (common random numbers), so the estimate is nondecreasing
/// along the grid exactly. Wilson intervals at 99% per point.
std::vector<McCdfPoint> mc_cdf(std::span<const double> p,
                               std::span<const double> t_grid, int M,
                               std::uint64_t seed, int threads = 0);

struct MeanEstimate {
  double mean;
  double se;
};

/// Riemann approximation of E int_0^1 |B(t)| dt via the fine_n-point
/// statistic under the uniform probability vector.
MeanEstimate limit_statistic_uniform_mean(int M, int fine_n, std::uint64_t seed,
                                          int threads = 0);

/// Gaussian-norm tail approximation: with alpha_1 the top eigenvalue of the
/// covariance (multiplicity m detected at relative gap 1e-8), approximates
/// P(||X||_2 >= sqrt(t * alpha_1)) by
///   2^(1-m/2)/Gamma(m/2) * exp(-t/2) * t^(m/2-1) * prod_j (1-a_j/a_1)^(-1/2).
/// Asymptotic in t; can exceed 1 for small t.
double eigen_tail(const BridgeCovariance& cov, double t);

/// Diagnostic upper-tail bound for P(statistic >= t): the norm-tail
/// approximation applied at threshold t^2 (n-1) / alpha_1. Asymptotic shape
/// only; the multiplicative constant is not certified.
double l1_tail_bound(const BridgeCovariance& cov, double t);
double l1_tail_bound(std::span<const double> p, double t);

}  // namespace wq::bridge
