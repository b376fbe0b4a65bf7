#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wq/bridge.hpp"

namespace wq::quantiles {

/// Order-statistic quantile with a 99% binomial bracketing interval.
struct QuantileEstimate {
  double alpha = 0.0;
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int M = 0;
  bool min_flag = false;  // alpha == 0 fell back to the sample minimum
};

/// The inf-definition quantile: the ceil(alpha*M)-th order statistic
/// (type-1, no interpolation).
QuantileEstimate empirical_quantile(const bridge::DistanceSample& sample,
                                    double alpha);

/// Same, on an already sorted ascending sample.
QuantileEstimate quantile_of_sorted(std::span<const double> sorted,
                                    double alpha);

/// Probability vector of the extremal mixture on an n-point grid:
/// endpoints lambda/2 + (1-lambda)/n, interior (1-lambda)/n. Endpoint
/// entries absorb rounding so the vector sums to 1 exactly.
std::vector<double> mixture_pvector(double lambda, int n);

/// Per-alpha argmax of the statistic quantile over a lambda grid, computed
/// with common random numbers (one shared set of standard-normal draws mapped
/// through each lambda's factor). Ties break toward smaller lambda.
struct LambdaCurve {
  std::vector<double> alphas;
  std::vector<double> lambda_hat;
  std::vector<double> quantile_at_max;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<double> lambda_grid;
};

LambdaCurve lambda_curve(int n, std::span<const double> alphas,
                         std::span<const double> lambda_grid, int M,
                         std::uint64_t seed, int threads = 0);

/// quantile(symmetrized p) - quantile(p) under common random numbers, where
/// the symmetrization averages the endpoints and equalizes interior mass.
struct SymmetryGain {
  double gain = 0.0;
  double joint_se = 0.0;
  double quantile_original = 0.0;
  double quantile_symmetrized = 0.0;
};

SymmetryGain symmetry_gain(std::span<const double> p, double alpha, int M,
                           std::uint64_t seed, int threads = 0);

/// Monte Carlo expected shortfall E[(statistic - K)^+] with standard error.
struct ShortfallEstimate {
  double value = 0.0;
  double se = 0.0;
};

ShortfallEstimate dominance_integral(std::span<const double> p, double K, int M,
                                     std::uint64_t seed, int threads = 0);

}  // namespace wq::quantiles
