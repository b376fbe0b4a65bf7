#pragma once

#include <cstdint>
#include <span>

namespace wq::stats {

double normal_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc-based).
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1).
///
/// Rational approximation (Acklam) polished by one Newton step against the
/// erfc-based CDF; absolute error well below 1e-10 across the domain.
double inverse_normal_cdf(double p);

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval for a binomial proportion at the given confidence.
Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                         double confidence);

/// 1-based order-statistic ranks [lo, hi] bracketing the alpha-quantile of an
/// n-sample at the given confidence, from the Binomial(n, alpha) law of the
/// number of observations below the true quantile.
struct RankBracket {
  int lo;
  int hi;
};
RankBracket quantile_rank_bracket(int n, double alpha, double confidence);

/// Two-sample Kolmogorov distance sup_t |F_a(t) - F_b(t)| between the
/// empirical CDFs of a and b (inputs need not be sorted).
double two_sample_ks(std::span<const double> a, std::span<const double> b);

struct MeanSe {
  double mean;
  double se;
};
MeanSe mean_and_se(std::span<const double> values);

}  // namespace wq::stats
