#include "wq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wq::stats {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");

  // Acklam's rational approximation, |relative error| < 1.15e-9.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Newton polish step against the erfc-based CDF.
  const double pdf = normal_pdf(x);
  if (pdf > 1e-280) {
    x -= (normal_cdf(x) - p) / pdf;
  }
  return x;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                         double confidence) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials <= 0");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes out of range");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("wilson_interval: confidence out of (0,1)");
  const double z = inverse_normal_cdf(0.5 * (1.0 + confidence));
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

// P(Binomial(n, p) <= k), summed over a window around the mean so that it
// stays O(sqrt(n)) even for large n; terms outside contribute < 1e-16.
double binom_cdf(int k, int n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double mu = n * p;
  const double sd = std::sqrt(n * p * (1.0 - p));
  const int lo = std::max(0, static_cast<int>(std::floor(mu - 12.0 * sd)) - 2);
  const int hi = std::min(n, static_cast<int>(std::ceil(mu + 12.0 * sd)) + 2);
  if (k < lo) return 0.0;
  if (k >= hi) return 1.0;
  double cdf = 0.0;
  for (int i = lo; i <= k; ++i) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                          std::lgamma(n - i + 1.0) + i * std::log(p) +
                          (n - i) * std::log1p(-p);
    cdf += std::exp(logpmf);
  }
  return std::min(cdf, 1.0);
}

}  // namespace

RankBracket quantile_rank_bracket(int n, double alpha, double confidence) {
  if (n <= 0) throw std::invalid_argument("quantile_rank_bracket: n <= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("quantile_rank_bracket: alpha out of [0,1]");
  const double tail = 0.5 * (1.0 - confidence);
  if (alpha <= 0.0) return {1, 1};
  if (alpha >= 1.0) return {n, n};

  // Search window around the binomial mean.
  const double mu = n * alpha;
  const double sd = std::sqrt(n * alpha * (1.0 - alpha));
  int lo = static_cast<int>(std::floor(mu - 12.0 * sd)) - 2;
  int hi = static_cast<int>(std::ceil(mu + 12.0 * sd)) + 2;
  lo = std::max(lo, 0);
  hi = std::min(hi, n);

  // Largest l with P(K < l) <= tail, i.e. binom_cdf(l-1) <= tail.
  int l = lo;
  for (int i = lo; i <= hi; ++i) {
    if (binom_cdf(i - 1, n, alpha) <= tail)
      l = i;
    else
      break;
  }
  // Smallest u with P(K <= u - 1) >= 1 - tail.
  int u = hi + 1;
  for (int i = hi + 1; i >= lo; --i) {
    if (binom_cdf(i - 1, n, alpha) >= 1.0 - tail)
      u = i;
    else
      break;
  }
  l = std::clamp(l, 1, n);
  u = std::clamp(u, l, n);
  return {l, u};
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("two_sample_ks: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double ks = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double t = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= t) ++i;
    while (j < sb.size() && sb[j] <= t) ++j;
    ks = std::max(ks, std::abs(i / na - j / nb));
  }
  return ks;
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_and_se: empty");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / (static_cast<double>(values.size()) - 1.0);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

}  // namespace wq::stats
