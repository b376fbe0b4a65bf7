#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wq/rng.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Exhaustive transportation-polytope vertex enumeration.
//
// Every basic feasible solution of the balanced transportation problem lives
// on a spanning tree of K_{m,n}. This enumerates all (m+n-1)-arc subsets,
// keeps the trees, solves the unique tree flow by leaf elimination, rejects
// infeasible (negative-flow) vertices and minimizes cost over the rest.
// Completely independent of any simplex pivoting.
// ---------------------------------------------------------------------------
inline double brute_force_min_cost(const std::vector<double>& supply,
                                   const std::vector<double>& demand,
                                   const std::vector<double>& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  const int arcs = m * n;
  const int basis = m + n - 1;
  if (arcs > 25) throw std::invalid_argument("brute force limited to tiny instances");

  std::vector<int> pick(static_cast<std::size_t>(basis));
  std::iota(pick.begin(), pick.end(), 0);
  double best = std::numeric_limits<double>::infinity();

  const auto evaluate = [&](const std::vector<int>& subset) {
    // union-find acyclicity + connectivity
    std::vector<int> parent(static_cast<std::size_t>(m + n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
      while (parent[static_cast<std::size_t>(v)] != v) {
        parent[static_cast<std::size_t>(v)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        v = parent[static_cast<std::size_t>(v)];
      }
      return v;
    };
    for (int e : subset) {
      const int a = e / n, b = m + e % n;
      const int ra = find(a), rb = find(b);
      if (ra == rb) return;  // cycle
      parent[static_cast<std::size_t>(ra)] = rb;
    }

    // leaf elimination for the unique tree flow
    std::vector<double> residual(supply.begin(), supply.end());
    residual.insert(residual.end(), demand.begin(), demand.end());
    std::vector<int> degree(static_cast<std::size_t>(m + n), 0);
    std::vector<char> alive(subset.size(), 1);
    for (int e : subset) {
      ++degree[static_cast<std::size_t>(e / n)];
      ++degree[static_cast<std::size_t>(m + e % n)];
    }
    double total = 0.0;
    for (int round = 0; round < basis; ++round) {
      int leaf_arc = -1, leaf_node = -1;
      for (std::size_t k = 0; k < subset.size(); ++k) {
        if (!alive[k]) continue;
        const int a = subset[k] / n, b = m + subset[k] % n;
        if (degree[static_cast<std::size_t>(a)] == 1) {
          leaf_arc = static_cast<int>(k);
          leaf_node = a;
          break;
        }
        if (degree[static_cast<std::size_t>(b)] == 1) {
          leaf_arc = static_cast<int>(k);
          leaf_node = b;
          break;
        }
      }
      if (leaf_arc < 0) return;
      const int e = subset[static_cast<std::size_t>(leaf_arc)];
      const int a = e / n, b = m + e % n;
      const int other = leaf_node == a ? b : a;
      double flow = residual[static_cast<std::size_t>(leaf_node)];
      if (flow < -1e-12) return;  // infeasible vertex
      if (flow < 0.0) flow = 0.0;
      total += flow * cost[static_cast<std::size_t>(e)];
      residual[static_cast<std::size_t>(other)] -= flow;
      residual[static_cast<std::size_t>(leaf_node)] = 0.0;
      alive[static_cast<std::size_t>(leaf_arc)] = 0;
      --degree[static_cast<std::size_t>(leaf_node)];
      --degree[static_cast<std::size_t>(other)];
    }
    best = std::min(best, total);
  };

  // iterate all subsets of size m+n-1
  while (true) {
    evaluate(pick);
    int i = basis - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == arcs - basis + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < basis; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (!std::isfinite(best))
    throw std::runtime_error("brute force found no feasible vertex");
  return best;
}

// ---------------------------------------------------------------------------
// Quadrature oracle for E|X| with X ~ N(0, variance): Simpson rule on
// [0, 12 sigma], doubled by symmetry. Used to pin statistic means without
// trusting any closed form in the library.
// ---------------------------------------------------------------------------
inline double quad_mean_abs_normal(double variance) {
  if (variance == 0.0) return 0.0;
  const double sigma = std::sqrt(variance);
  const int steps = 20000;  // even
  const double hi = 12.0 * sigma;
  const double h = hi / steps;
  const auto f = [sigma](double x) {
    return x * std::exp(-0.5 * (x / sigma) * (x / sigma)) /
           (sigma * std::sqrt(2.0 * M_PI));
  };
  double acc = f(0.0) + f(hi);
  for (int i = 1; i < steps; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return 2.0 * acc * h / 3.0;
}

// Same rule for int_0^1 sqrt(2 t (1-t) / pi) dt, the mean of the integrated
// absolute bridge.
inline double quad_mean_abs_bridge_integral() {
  const int steps = 200000;
  const double h = 1.0 / steps;
  const auto f = [](double t) { return std::sqrt(2.0 * t * (1.0 - t) / M_PI); };
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < steps; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// Independent route to the discretized bridge: cumulative sums of Gaussian
// increments, B(q_i) = W(q_i) - q_i W(1). Shares no code with the Cholesky
// sampling path.
// ---------------------------------------------------------------------------
inline std::vector<double> cumsum_bridge_statistic(const std::vector<double>& p,
                                                   int M, std::uint64_t seed) {
  const int n = static_cast<int>(p.size());
  std::vector<double> values(static_cast<std::size_t>(M));
  for (int r = 0; r < M; ++r) {
    wq::RngStream rng(seed, static_cast<std::uint64_t>(r));
    double w = 0.0;
    std::vector<double> wq_points(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
      w += std::sqrt(p[static_cast<std::size_t>(i)]) * rng.next_normal();
      if (i < n - 1) wq_points[static_cast<std::size_t>(i)] = w;
    }
    double q = 0.0, s = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      q += p[static_cast<std::size_t>(i)];
      s += std::abs(wq_points[static_cast<std::size_t>(i)] - q * w);
    }
    values[static_cast<std::size_t>(r)] = s / (n - 1);
  }
  return values;
}

// One-sample Kolmogorov statistic against the uniform CDF on [0,1].
inline double ks_vs_uniform(std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    d = std::max(d, std::abs((i + 1) / n - draws[i]));
    d = std::max(d, std::abs(draws[i] - i / n));
  }
  return d;
}

}  // namespace oracles
