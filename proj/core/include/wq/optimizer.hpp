#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wq/measures.hpp"

namespace wq::optimizer {

/// Softmax map with the last logit pinned to zero: theta in R^(nx*ny-1)
/// induces a probability matrix. Surjective onto the interior; vertices are
/// reached within 1e-6 mass for |theta| ~ 15.
measures::FiniteMeasure2D simplex_to_measure(const Eigen::VectorXd& theta,
                                             int nx, int ny);

/// Approximate inverse for interior p: theta_i = log(p_i / p_last).
Eigen::VectorXd measure_to_theta(const measures::FiniteMeasure2D& m);

/// Empirical alpha-quantile of the grid Wasserstein distance between p and M
/// independent size-N empirical measures drawn from p. Noisy by construction;
/// replicate r uses stream (seed, r).
double objective_quantile(const measures::FiniteMeasure2D& p, int N, int M,
                          double alpha, std::uint64_t seed, int threads = 0);

struct GpHyper {
  double signal_var = 1.0;
  double noise_var = 1e-4;
  Eigen::VectorXd length_scales;  // per input dimension
  bool fix_noise = false;
};

/// Anisotropic squared-exponential GP with constant (sample-mean) prior.
struct GPSurrogate {
  Eigen::MatrixXd X;  // one input per row
  Eigen::VectorXd y;
  double y_mean = 0.0;
  GpHyper hyper;
  Eigen::MatrixXd chol;   // factor of K + noise*I (+ jitter)
  Eigen::VectorXd alpha;  // (K + noise*I)^{-1} (y - y_mean)
  double jitter = 0.0;
  double log_marginal = 0.0;
};

/// Fits hyperparameters by marginal likelihood over a fixed multi-start grid
/// followed by coordinate descent in log space (derivative-free). The initial
/// hyperparameters join the candidate set; fix_noise pins the noise variance.
GPSurrogate gp_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const GpHyper& init);

struct Posterior {
  double mean;
  double variance;
};

Posterior gp_posterior(const GPSurrogate& model, const Eigen::VectorXd& x);

/// Maximization-form expected improvement:
/// (mu - b) Phi(z) + sigma phi(z), z = (mu - b)/sigma; sigma = 0 gives
/// max(mu - b, 0).
double expected_improvement(double mean, double variance, double best_so_far);

struct TraceEntry {
  int index = 0;
  Eigen::VectorXd theta;
  double value = 0.0;
  double incumbent = 0.0;  // running max of observed values
};

struct OptimizeResult {
  Eigen::VectorXd best_theta;
  double best_value = 0.0;
  std::vector<TraceEntry> trace;
  GPSurrogate surrogate;
};

/// Bayesian optimization of the quantile objective over theta space:
/// Latin-hypercube design of size min(5*dim, 50), then EI-driven sequential
/// evaluations until the budget is exhausted. Objective call i derives its
/// seed from (seed, i).
OptimizeResult optimize(int nx, int ny, int N, int M, double alpha, int budget,
                        std::uint64_t seed, int threads = 0);

}  // namespace wq::optimizer
