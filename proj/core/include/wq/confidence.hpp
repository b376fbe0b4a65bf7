#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wq/measures.hpp"

namespace wq::confidence {

/// Normalized radius k = Phi^{-1}((1+alpha)/2) / 2 for alpha in [0,1).
/// alpha = 1 would give an infinite radius and is rejected.
double radius_k(double alpha);

/// Exact tail of |B(1/2)|: P(|B(1/2)| >= t) = 2 - 2 Phi(2t), t >= 0.
double normal_tail_2m2phi(double t);

/// Wasserstein ball of radius k N^{-1/2} around the empirical measure.
struct ConfidenceRegion {
  measures::DiscreteMeasure1D center;
  double radius = 0.0;
  double alpha = 0.0;
  double k = 0.0;
  int N = 0;
};

ConfidenceRegion make_region(const measures::SampleBatch& batch, double alpha);

struct ContainmentResult {
  bool contained = false;
  double margin = 0.0;  // radius - distance (signed)
  double distance = 0.0;
  double radius = 0.0;
};

/// Tests whether a candidate measure lies in the region around the batch's
/// empirical measure; the distance is the exact 1-D breakpoint integral.
ContainmentResult region_contains(const measures::SampleBatch& batch,
                                  const measures::Measure1D& candidate,
                                  double alpha);

struct CoverageResult {
  double coverage = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int reps = 0;
  /// The region guarantee is asymptotic in alpha -> 1; set for alpha < 0.7.
  bool asymptotic_warning = false;
};

/// Fraction of replicates whose region contains the sampling measure P,
/// with a 99% Wilson interval. Replicate r uses stream (seed, r).
CoverageResult coverage_sim(const measures::Measure1D& P, int N, double alpha,
                            int reps, std::uint64_t seed, int threads = 0);

/// 1-Lipschitz function tabulated on breakpoints; linear in between,
/// constant outside the table range.
struct LipschitzTable {
  std::vector<double> xs;
  std::vector<double> ys;
};

double eval_lipschitz(const LipschitzTable& f, double x);

struct MeanInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;
  double halfwidth = 0.0;
  /// The same interval is simultaneously valid for every f in Lip_1.
  bool uniform_over_lip1 = true;
};

/// Interval [mean(f) - k/sqrt(N), mean(f) + k/sqrt(N)] for E_P[f]. Rejects
/// tables violating |f(x_{j+1}) - f(x_j)| <= |x_{j+1} - x_j| + 1e-12,
/// naming the offending breakpoint pair.
MeanInterval lipschitz_mean_bounds(const measures::SampleBatch& batch,
                                   const LipschitzTable& f, double alpha);

}  // namespace wq::confidence
