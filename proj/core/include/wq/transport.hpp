#pragma once

#include <string>
#include <vector>

#include "wq/measures.hpp"

namespace wq::transport {

/// Piecewise-linear right-continuous CDF: value fr[k] at breakpoint x[k],
/// slope[k] on (x[k], x[k+1]). Jumps happen exactly at breakpoints.
struct CdfCurve {
  std::vector<double> x;
  std::vector<double> fr;
  std::vector<double> slope;
};

CdfCurve make_cdf_curve(const measures::FiniteMeasure1D& m);
CdfCurve make_cdf_curve(const measures::DiscreteMeasure1D& m);
CdfCurve make_cdf_curve(const measures::MixtureMeasure& m);
CdfCurve make_cdf_curve(const measures::Measure1D& m);

/// Exact 1-Wasserstein distance on the line: the integral of |F_P - F_Q|
/// over the merged breakpoints, each segment split at its sign-change root.
double w1_1d(const CdfCurve& P, const CdfCurve& Q);
double w1_1d(const measures::Measure1D& P, const measures::Measure1D& Q);

template <typename MP, typename MQ>
double w1_1d(const MP& P, const MQ& Q) {
  return w1_1d(make_cdf_curve(P), make_cdf_curve(Q));
}

struct PlanEntry {
  int from_i, from_j;  // source grid indices
  int to_k, to_l;      // target grid indices
  double mass;
};

/// Optimal coupling with its dual certificate. Entries list nonzero masses
/// only; dual potentials cover every atom of each grid (zero-mass atoms get
/// the tight inf-extension, preserving dual feasibility).
struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0.0;
  std::vector<double> dual_u;  // row-major over the source grid
  std::vector<double> dual_v;  // row-major over the target grid
};

struct GridLpResult {
  double distance = 0.0;
  TransportPlan plan;
};

/// l1-ground-cost Wasserstein distance between two 2-D grid measures, solved
/// by network simplex on the bipartite transportation graph. The polytope is
/// integral in its basis structure, so the optimum is exact up to rounding.
/// A solver-reported infeasibility is impossible for valid inputs and raises
/// std::logic_error.
GridLpResult w1_grid_lp(const measures::FiniteMeasure2D& P,
                        const measures::FiniteMeasure2D& Q);

struct DualCheckResult {
  double gap = 0.0;            // |primal - dual objective|
  double max_violation = 0.0;  // worst feasibility/Lipschitz slack overrun
  bool feasible = true;
  std::string violation;  // location of the worst violation, empty if none
};

/// Verifies the plan's dual certificate: primal-dual gap, dual feasibility
/// u_a + v_b <= c(a,b), and 1-Lipschitz potentials w.r.t. the l1 metric on
/// each support (u_a - u_a' <= c(a,a'), same for v).
DualCheckResult kr_dual_check(const measures::FiniteMeasure2D& P,
                              const measures::FiniteMeasure2D& Q,
                              const TransportPlan& plan);

}  // namespace wq::transport
