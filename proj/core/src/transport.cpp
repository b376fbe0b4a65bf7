#include "wq/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wq::transport {

using measures::DiscreteMeasure1D;
using measures::FiniteMeasure1D;
using measures::FiniteMeasure2D;
using measures::Measure1D;
using measures::MixtureMeasure;

CdfCurve make_cdf_curve(const FiniteMeasure1D& m) {
  CdfCurve c;
  const int n = m.grid().n;
  c.x.resize(n);
  c.fr.assign(m.cumulative().begin(), m.cumulative().end());
  c.slope.assign(n, 0.0);
  for (int i = 0; i < n; ++i) c.x[i] = m.grid().point(i);
  return c;
}

CdfCurve make_cdf_curve(const DiscreteMeasure1D& m) {
  CdfCurve c;
  c.x.assign(m.atoms().begin(), m.atoms().end());
  c.fr.assign(m.cumulative().begin(), m.cumulative().end());
  c.slope.assign(c.x.size(), 0.0);
  return c;
}

CdfCurve make_cdf_curve(const MixtureMeasure& m) {
  CdfCurve c;
  c.x = {0.0, 1.0};
  c.fr = {0.5 * m.lambda(), 1.0};
  c.slope = {1.0 - m.lambda(), 0.0};
  return c;
}

CdfCurve make_cdf_curve(const Measure1D& m) {
  return std::visit([](const auto& mm) { return make_cdf_curve(mm); }, m);
}

namespace {

// integral of |linear from da to db| over a segment of width h
double abs_segment_integral(double da, double db, double h) {
  if (h <= 0.0) return 0.0;
  if ((da >= 0.0 && db >= 0.0) || (da <= 0.0 && db <= 0.0))
    return 0.5 * h * (std::abs(da) + std::abs(db));
  const double ada = std::abs(da), adb = std::abs(db);
  // sign change: two triangles split at the root
  return 0.5 * h * (ada * ada + adb * adb) / (ada + adb);
}

// right-continuous value at t given the index k of the last breakpoint <= t
double curve_value(const CdfCurve& c, int k, double t) {
  if (k < 0) return 0.0;
  return c.fr[k] + c.slope[k] * (t - c.x[k]);
}

}  // namespace

double w1_1d(const CdfCurve& P, const CdfCurve& Q) {
  std::vector<double> pts;
  pts.reserve(P.x.size() + Q.x.size());
  pts.insert(pts.end(), P.x.begin(), P.x.end());
  pts.insert(pts.end(), Q.x.begin(), Q.x.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double total = 0.0;
  int kp = -1, kq = -1;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double a = pts[s], b = pts[s + 1];
    while (kp + 1 < static_cast<int>(P.x.size()) && P.x[kp + 1] <= a) ++kp;
    while (kq + 1 < static_cast<int>(Q.x.size()) && Q.x[kq + 1] <= a) ++kq;
    const double da = curve_value(P, kp, a) - curve_value(Q, kq, a);
    const double db = curve_value(P, kp, b) - curve_value(Q, kq, b);
    total += abs_segment_integral(da, db, b - a);
  }
  return total;
}

double w1_1d(const Measure1D& P, const Measure1D& Q) {
  return w1_1d(make_cdf_curve(P), make_cdf_curve(Q));
}

namespace {

constexpr double kReducedCostTol = 1e-12;
constexpr double kMarginalTol = 1e-9;

// Balanced transportation problem min sum c_ab f_ab over nonnegative flows
// with fixed row/column sums, solved by primal network simplex on the tree
// basis. Pivot rule: first negative reduced cost found by a cyclic scan;
// after a run of degenerate pivots it falls back to Bland's rule (smallest
// entering index, smallest leaving index on ties), which cannot cycle.
class TransportationSimplex {
 public:
  TransportationSimplex(std::vector<double> supply, std::vector<double> demand,
                        std::vector<double> cost)
      : m_(static_cast<int>(supply.size())),
        n_(static_cast<int>(demand.size())),
        s_(std::move(supply)),
        d_(std::move(demand)),
        c_(std::move(cost)) {
    // absorb rounding dust so the recursion below closes exactly
    double sum_s = 0.0, sum_d = 0.0;
    for (double v : s_) sum_s += v;
    for (double v : d_) sum_d += v;
    if (std::abs(sum_s - sum_d) > kMarginalTol)
      throw std::logic_error("transportation problem is unbalanced");
    const auto dmax = std::max_element(d_.begin(), d_.end());
    *dmax += sum_s - sum_d;
    build_initial_basis();
  }

  void solve() {
    compute_duals();
    const int max_pivots = 1000 * (m_ + n_) + 100000;
    int degenerate_run = 0;
    bool bland = false;
    int scan_from = 0;
    for (int pivot = 0; pivot < max_pivots; ++pivot) {
      const int enter = find_entering(bland ? 0 : scan_from);
      if (enter < 0) return;  // optimal
      scan_from = enter + 1 == m_ * n_ ? 0 : enter + 1;
      const double theta = pivot_on(enter / n_, enter % n_);
      if (theta <= 0.0) {
        if (++degenerate_run > 32 * (m_ + n_)) bland = true;
      } else {
        degenerate_run = 0;
      }
      compute_duals();
    }
    throw std::logic_error(
        "network simplex exceeded pivot budget; this indicates a defect");
  }

  double objective() const {
    double total = 0.0;
    for (int k = 0; k < num_arcs_; ++k)
      total += flow_[k] * c_[static_cast<std::size_t>(src_[k]) * n_ + snk_[k]];
    return total;
  }

  // nonzero flows as (source, sink, mass), tiny negatives clamped
  std::vector<std::array<int, 2>> nonzero_arcs(std::vector<double>* masses) const {
    std::vector<std::array<int, 2>> arcs;
    for (int k = 0; k < num_arcs_; ++k) {
      double f = flow_[k];
      if (f < 0.0) {
        if (f < -kMarginalTol)
          throw std::logic_error("negative flow in simplex basis");
        f = 0.0;
      }
      if (f > 0.0) {
        arcs.push_back({src_[k], snk_[k]});
        masses->push_back(f);
      }
    }
    return arcs;
  }

  const std::vector<double>& duals_u() const { return u_; }
  const std::vector<double>& duals_v() const { return v_; }

 private:
  void add_arc(int a, int b, double f) {
    src_.push_back(a);
    snk_.push_back(b);
    flow_.push_back(f);
    adj_[a].push_back(num_arcs_);
    adj_[m_ + b].push_back(num_arcs_);
    ++num_arcs_;
  }

  void build_initial_basis() {
    adj_.assign(static_cast<std::size_t>(m_ + n_), {});
    src_.reserve(static_cast<std::size_t>(m_ + n_ - 1));
    snk_.reserve(static_cast<std::size_t>(m_ + n_ - 1));
    flow_.reserve(static_cast<std::size_t>(m_ + n_ - 1));
    // northwest corner rule; ties create degenerate zero arcs
    int i = 0, j = 0;
    double rs = s_[0], rd = d_[0];
    while (true) {
      const double f = std::max(0.0, std::min(rs, rd));
      add_arc(i, j, f);
      rs -= f;
      rd -= f;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (rs <= 0.0 && i < m_ - 1) {
        ++i;
        rs = s_[i];
      } else if (j < n_ - 1) {
        ++j;
        rd = d_[j];
      } else {
        ++i;
        rs = s_[i];
      }
    }
  }

  void compute_duals() {
    u_.assign(static_cast<std::size_t>(m_), 0.0);
    v_.assign(static_cast<std::size_t>(n_), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(m_ + n_), 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int k : adj_[node]) {
        const int a = src_[k], b = m_ + snk_[k];
        const int other = node == a ? b : a;
        if (seen[other]) continue;
        seen[other] = 1;
        const double cab = c_[static_cast<std::size_t>(src_[k]) * n_ + snk_[k]];
        if (other == b)
          v_[snk_[k]] = cab - u_[src_[k]];
        else
          u_[src_[k]] = cab - v_[snk_[k]];
        stack.push_back(other);
      }
    }
  }

  // first arc (cyclic from start) with negative reduced cost, or -1
  int find_entering(int start) const {
    const int total = m_ * n_;
    for (int step = 0; step < total; ++step) {
      const int e = (start + step) % total;
      const int a = e / n_, b = e % n_;
      if (c_[static_cast<std::size_t>(a) * n_ + b] - u_[a] - v_[b] <
          -kReducedCostTol)
        return e;
    }
    return -1;
  }

  // pivot entering arc (a, b) into the basis; returns the flow shift theta
  double pivot_on(int a, int b) {
    // tree path from node a to node m_+b
    std::vector<int> parent_arc(static_cast<std::size_t>(m_ + n_), -1);
    std::vector<int> parent(static_cast<std::size_t>(m_ + n_), -1);
    std::vector<char> seen(static_cast<std::size_t>(m_ + n_), 0);
    std::vector<int> stack = {a};
    seen[a] = 1;
    const int target = m_ + b;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node == target) break;
      for (int k : adj_[node]) {
        const int na = src_[k], nb = m_ + snk_[k];
        const int other = node == na ? nb : na;
        if (seen[other]) continue;
        seen[other] = 1;
        parent[other] = node;
        parent_arc[other] = k;
        stack.push_back(other);
      }
    }
    if (!seen[target]) throw std::logic_error("basis is not a spanning tree");

    // cycle = entering arc + path target -> a; path arcs alternate -/+
    std::vector<int> path;
    for (int node = target; node != a; node = parent[node])
      path.push_back(parent_arc[node]);
    // path[0] is adjacent to the sink; even positions receive -theta
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const int k = path[t];
      if (flow_[k] < theta - 1e-18 ||
          (std::abs(flow_[k] - theta) <= 1e-18 &&
           (leaving < 0 || arc_order(k) < arc_order(leaving)))) {
        theta = flow_[k];
        leaving = k;
      }
    }
    if (leaving < 0) throw std::logic_error("no leaving arc found");
    theta = std::max(theta, 0.0);
    for (std::size_t t = 0; t < path.size(); ++t) {
      flow_[path[t]] += (t % 2 == 0) ? -theta : theta;
      if (flow_[path[t]] < 0.0) flow_[path[t]] = 0.0;
    }
    // replace the leaving arc in place
    detach_arc(leaving);
    src_[leaving] = a;
    snk_[leaving] = b;
    flow_[leaving] = theta;
    adj_[a].push_back(leaving);
    adj_[m_ + b].push_back(leaving);
    return theta;
  }

  long long arc_order(int k) const {
    return static_cast<long long>(src_[k]) * n_ + snk_[k];
  }

  void detach_arc(int k) {
    auto& la = adj_[src_[k]];
    la.erase(std::find(la.begin(), la.end(), k));
    auto& lb = adj_[m_ + snk_[k]];
    lb.erase(std::find(lb.begin(), lb.end(), k));
  }

  int m_, n_;
  std::vector<double> s_, d_, c_;
  std::vector<int> src_, snk_;
  std::vector<double> flow_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> u_, v_;
  int num_arcs_ = 0;
};

double l1_ground_cost(const FiniteMeasure2D& P, int i, int j,
                      const FiniteMeasure2D& Q, int k, int l) {
  return std::abs(P.grid_x().point(i) - Q.grid_x().point(k)) +
         std::abs(P.grid_y().point(j) - Q.grid_y().point(l));
}

}  // namespace

GridLpResult w1_grid_lp(const FiniteMeasure2D& P, const FiniteMeasure2D& Q) {
  const int pny = P.grid_y().n, qny = Q.grid_y().n;

  // prune zero-mass atoms (degenerate supply nodes stall the simplex)
  std::vector<int> src_atoms, snk_atoms;
  std::vector<double> supply, demand;
  for (int i = 0; i < P.grid_x().n; ++i)
    for (int j = 0; j < pny; ++j)
      if (P.at(i, j) > 0.0) {
        src_atoms.push_back(i * pny + j);
        supply.push_back(P.at(i, j));
      }
  for (int k = 0; k < Q.grid_x().n; ++k)
    for (int l = 0; l < qny; ++l)
      if (Q.at(k, l) > 0.0) {
        snk_atoms.push_back(k * qny + l);
        demand.push_back(Q.at(k, l));
      }
  if (supply.empty() || demand.empty())
    throw std::logic_error("w1_grid_lp: measure without mass");

  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  std::vector<double> cost(static_cast<std::size_t>(m) * n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < n; ++b)
      cost[static_cast<std::size_t>(a) * n + b] =
          l1_ground_cost(P, src_atoms[a] / pny, src_atoms[a] % pny, Q,
                         snk_atoms[b] / qny, snk_atoms[b] % qny);

  TransportationSimplex simplex(supply, demand, cost);
  simplex.solve();

  GridLpResult res;
  res.plan.cost = simplex.objective();
  res.distance = res.plan.cost;

  std::vector<double> masses;
  const auto arcs = simplex.nonzero_arcs(&masses);
  res.plan.entries.reserve(arcs.size());
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const int sa = src_atoms[arcs[k][0]], sb = snk_atoms[arcs[k][1]];
    res.plan.entries.push_back(
        {sa / pny, sa % pny, sb / qny, sb % qny, masses[k]});
  }

  // marginal residual check on the solved atoms
  {
    std::vector<double> rs(supply), rd(demand);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      rs[arcs[k][0]] -= masses[k];
      rd[arcs[k][1]] -= masses[k];
    }
    for (double r : rs)
      if (std::abs(r) > kMarginalTol)
        throw std::logic_error("w1_grid_lp: source marginal violated");
    for (double r : rd)
      if (std::abs(r) > kMarginalTol)
        throw std::logic_error("w1_grid_lp: target marginal violated");
  }

  // dual potentials for every atom; zero-mass atoms get the tight
  // inf-extension, which keeps u 1-Lipschitz and feasibility intact
  const auto& u = simplex.duals_u();
  const auto& v = simplex.duals_v();
  res.plan.dual_u.assign(static_cast<std::size_t>(P.grid_x().n) * pny, 0.0);
  res.plan.dual_v.assign(static_cast<std::size_t>(Q.grid_x().n) * qny, 0.0);
  for (int a = 0; a < m; ++a) res.plan.dual_u[src_atoms[a]] = u[a];
  for (int b = 0; b < n; ++b) res.plan.dual_v[snk_atoms[b]] = v[b];
  for (int i = 0; i < P.grid_x().n; ++i)
    for (int j = 0; j < pny; ++j) {
      if (P.at(i, j) > 0.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int b = 0; b < n; ++b)
        best = std::min(best, l1_ground_cost(P, i, j, Q, snk_atoms[b] / qny,
                                             snk_atoms[b] % qny) -
                                  v[b]);
      res.plan.dual_u[static_cast<std::size_t>(i) * pny + j] = best;
    }
  for (int k = 0; k < Q.grid_x().n; ++k)
    for (int l = 0; l < qny; ++l) {
      if (Q.at(k, l) > 0.0) continue;
      // minimize over every source atom, including the extended ones, so
      // feasibility holds on pruned-pruned pairs too
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < P.grid_x().n; ++i)
        for (int j = 0; j < pny; ++j)
          best = std::min(
              best, l1_ground_cost(P, i, j, Q, k, l) -
                        res.plan.dual_u[static_cast<std::size_t>(i) * pny + j]);
      res.plan.dual_v[static_cast<std::size_t>(k) * qny + l] = best;
    }

  // strong duality must hold at the optimum
  double dual_obj = 0.0;
  for (int a = 0; a < m; ++a) dual_obj += u[a] * supply[a];
  for (int b = 0; b < n; ++b) dual_obj += v[b] * demand[b];
  if (std::abs(dual_obj - res.plan.cost) > kMarginalTol)
    throw std::logic_error("w1_grid_lp: primal-dual gap exceeds tolerance");

  return res;
}

DualCheckResult kr_dual_check(const FiniteMeasure2D& P, const FiniteMeasure2D& Q,
                              const TransportPlan& plan) {
  const int pnx = P.grid_x().n, pny = P.grid_y().n;
  const int qnx = Q.grid_x().n, qny = Q.grid_y().n;
  if (plan.dual_u.size() != static_cast<std::size_t>(pnx) * pny ||
      plan.dual_v.size() != static_cast<std::size_t>(qnx) * qny)
    throw std::invalid_argument("kr_dual_check: plan does not match measures");

  DualCheckResult out;
  double dual_obj = 0.0;
  for (int i = 0; i < pnx; ++i)
    for (int j = 0; j < pny; ++j)
      dual_obj += plan.dual_u[static_cast<std::size_t>(i) * pny + j] * P.at(i, j);
  for (int k = 0; k < qnx; ++k)
    for (int l = 0; l < qny; ++l)
      dual_obj += plan.dual_v[static_cast<std::size_t>(k) * qny + l] * Q.at(k, l);
  out.gap = std::abs(plan.cost - dual_obj);

  auto record = [&out](double viol, const std::string& where) {
    if (viol > out.max_violation) {
      out.max_violation = viol;
      out.violation = where;
    }
  };

  // dual feasibility u_a + v_b <= c(a,b)
  for (int i = 0; i < pnx; ++i)
    for (int j = 0; j < pny; ++j)
      for (int k = 0; k < qnx; ++k)
        for (int l = 0; l < qny; ++l) {
          const double slack =
              plan.dual_u[static_cast<std::size_t>(i) * pny + j] +
              plan.dual_v[static_cast<std::size_t>(k) * qny + l] -
              l1_ground_cost(P, i, j, Q, k, l);
          if (slack > kMarginalTol)
            record(slack, "u(" + std::to_string(i) + "," + std::to_string(j) +
                              ")+v(" + std::to_string(k) + "," +
                              std::to_string(l) + ") > cost");
        }

  // 1-Lipschitz potentials on each support
  auto lipschitz = [&record](const std::vector<double>& pot, int nx, int ny,
                             const char* name) {
    for (int a = 0; a < nx * ny; ++a)
      for (int b = a + 1; b < nx * ny; ++b) {
        const double dist =
            std::abs(static_cast<double>(a / ny - b / ny) / (nx - 1)) +
            std::abs(static_cast<double>(a % ny - b % ny) / (ny - 1));
        const double viol = std::abs(pot[a] - pot[b]) - dist;
        if (viol > kMarginalTol)
          record(viol, std::string(name) + " not 1-Lipschitz between atoms " +
                           std::to_string(a) + " and " + std::to_string(b));
      }
  };
  lipschitz(plan.dual_u, pnx, pny, "u");
  lipschitz(plan.dual_v, qnx, qny, "v");

  out.feasible = out.violation.empty();
  return out;
}

}  // namespace wq::transport
