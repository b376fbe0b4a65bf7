#include "wq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wq::measures {

Grid1D::Grid1D(int n_points) : n(n_points) {
  if (n < 2) throw std::invalid_argument("Grid1D: need n >= 2 points");
}

void ensure_probability_vector(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("probability vector is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("probability vector entry outside [0,1]: " +
                                  std::to_string(v));
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("probability vector sums to " +
                                std::to_string(sum) + ", not 1");
}

std::vector<double> renormalized(std::span<const double> p) {
  std::vector<double> out(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : out) {
    if (v < 0.0) {
      if (v < -kSimplexTol)
        throw std::invalid_argument("renormalized: negative entry " +
                                    std::to_string(v));
      v = 0.0;
    }
    sum += v;
  }
  if (sum <= 0.0)
    throw std::invalid_argument("renormalized: vector has no mass");
  for (double& v : out) v /= sum;
  return out;
}

namespace {

std::vector<double> inclusive_cumsum(std::span<const double> p) {
  std::vector<double> cum(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += p[i];
    cum[i] = std::min(s, 1.0);
  }
  if (!cum.empty()) cum.back() = 1.0;
  return cum;
}

}  // namespace

FiniteMeasure1D::FiniteMeasure1D(Grid1D grid, std::vector<double> p)
    : grid_(grid), p_(std::move(p)) {
  if (static_cast<int>(p_.size()) != grid_.n)
    throw std::invalid_argument("FiniteMeasure1D: p length != grid size");
  ensure_probability_vector(p_);
  cum_ = inclusive_cumsum(p_);
}

DiscreteMeasure1D::DiscreteMeasure1D(std::vector<double> atoms,
                                     std::vector<double> weights) {
  if (atoms.size() != weights.size() || atoms.empty())
    throw std::invalid_argument("DiscreteMeasure1D: bad atom/weight lengths");
  ensure_probability_vector(weights);
  std::map<double, double> merged;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] >= 0.0 && atoms[i] <= 1.0))
      throw std::invalid_argument("DiscreteMeasure1D: atom outside [0,1]");
    merged[atoms[i]] += weights[i];
  }
  atoms_.reserve(merged.size());
  w_.reserve(merged.size());
  for (const auto& [x, w] : merged) {
    atoms_.push_back(x);
    w_.push_back(w);
  }
  cum_ = inclusive_cumsum(w_);
}

MixtureMeasure::MixtureMeasure(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("MixtureMeasure: lambda outside [0,1]");
}

FiniteMeasure2D::FiniteMeasure2D(Grid1D grid_x, Grid1D grid_y,
                                 std::vector<double> p)
    : gx_(grid_x), gy_(grid_y), p_(std::move(p)) {
  if (p_.size() != static_cast<std::size_t>(gx_.n) * gy_.n)
    throw std::invalid_argument("FiniteMeasure2D: p size != nx*ny");
  ensure_probability_vector(p_);
}

double cdf_eval(const FiniteMeasure1D& m, double t) {
  if (t < 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // index of the last grid point <= t
  const int n = m.grid().n;
  int idx = static_cast<int>(std::floor(t * (n - 1)));
  while (idx + 1 < n && m.grid().point(idx + 1) <= t) ++idx;
  while (idx >= 0 && m.grid().point(idx) > t) --idx;
  return idx < 0 ? 0.0 : m.cumulative()[idx];
}

double cdf_eval(const DiscreteMeasure1D& m, double t) {
  if (t < 0.0) return 0.0;
  if (t > 1.0) t = 1.0;
  const auto atoms = m.atoms();
  const auto it = std::upper_bound(atoms.begin(), atoms.end(), t);
  if (it == atoms.begin()) return 0.0;
  return m.cumulative()[static_cast<std::size_t>(it - atoms.begin()) - 1];
}

double cdf_eval(const MixtureMeasure& m, double t) {
  if (t < 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 * m.lambda() + (1.0 - m.lambda()) * t;
}

double cdf_eval(const Measure1D& m, double t) {
  return std::visit([t](const auto& mm) { return cdf_eval(mm, t); }, m);
}

std::vector<double> cumulative_q(std::span<const double> p) {
  ensure_probability_vector(p);
  if (p.size() < 2)
    throw std::invalid_argument("cumulative_q: need at least two atoms");
  std::vector<double> q(p.size() - 1);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    s += p[i];
    q[i] = std::clamp(s, 0.0, 1.0);
  }
  return q;
}

namespace {

// Smallest atom index with cum >= u; u in [0,1).
template <typename Cum>
int inverse_cdf_index(const Cum& cum, double u) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(
      it - cum.begin(), static_cast<std::ptrdiff_t>(cum.size()) - 1));
}

}  // namespace

SampleBatch sample(const FiniteMeasure1D& m, int N, RngStream& rng) {
  if (N < 1) throw std::invalid_argument("sample: N < 1");
  SampleBatch out;
  out.seed = rng.seed();
  out.draws.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const int i = inverse_cdf_index(m.cumulative(), rng.next_double());
    out.draws.push_back(m.grid().point(i));
  }
  return out;
}

SampleBatch sample(const DiscreteMeasure1D& m, int N, RngStream& rng) {
  if (N < 1) throw std::invalid_argument("sample: N < 1");
  SampleBatch out;
  out.seed = rng.seed();
  out.draws.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const int i = inverse_cdf_index(m.cumulative(), rng.next_double());
    out.draws.push_back(m.atoms()[i]);
  }
  return out;
}

SampleBatch sample(const MixtureMeasure& m, int N, RngStream& rng) {
  if (N < 1) throw std::invalid_argument("sample: N < 1");
  SampleBatch out;
  out.seed = rng.seed();
  out.draws.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    // two draws per sample regardless of branch, to keep stream usage fixed
    const double coin = rng.next_double();
    const double u = rng.next_double();
    if (coin < m.lambda()) {
      out.draws.push_back(u < 0.5 ? 0.0 : 1.0);
    } else {
      out.draws.push_back(u);
    }
  }
  return out;
}

SampleBatch sample(const Measure1D& m, int N, RngStream& rng) {
  return std::visit([&](const auto& mm) { return sample(mm, N, rng); }, m);
}

SampleBatch2D sample(const FiniteMeasure2D& m, int N, RngStream& rng) {
  if (N < 1) throw std::invalid_argument("sample: N < 1");
  std::vector<double> cum(m.p().size());
  double s = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    s += m.p()[i];
    cum[i] = std::min(s, 1.0);
  }
  cum.back() = 1.0;
  SampleBatch2D out;
  out.seed = rng.seed();
  out.draws.reserve(static_cast<std::size_t>(N));
  const int ny = m.grid_y().n;
  for (int k = 0; k < N; ++k) {
    const int flat = inverse_cdf_index(cum, rng.next_double());
    const int i = flat / ny;
    const int j = flat % ny;
    out.draws.push_back({m.grid_x().point(i), m.grid_y().point(j)});
  }
  return out;
}

namespace {

constexpr double kGridSnapTol = 1e-9;

int grid_index_of(const Grid1D& grid, double x) {
  const int i = static_cast<int>(std::lround(x * (grid.n - 1)));
  if (i < 0 || i >= grid.n || std::abs(x - grid.point(i)) > kGridSnapTol)
    throw std::invalid_argument("empirical_measure: draw " + std::to_string(x) +
                                " is not on the grid");
  return i;
}

}  // namespace

FiniteMeasure1D empirical_measure(const SampleBatch& batch, const Grid1D& grid) {
  if (batch.draws.empty())
    throw std::invalid_argument("empirical_measure: empty batch");
  // integer counts first, one division per cell: count/N is exact at 0 and 1
  std::vector<std::int64_t> counts(static_cast<std::size_t>(grid.n), 0);
  for (double x : batch.draws)
    ++counts[static_cast<std::size_t>(grid_index_of(grid, x))];
  const double N = static_cast<double>(batch.draws.size());
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / N;
  return FiniteMeasure1D(grid, std::move(p));
}

DiscreteMeasure1D empirical_measure(const SampleBatch& batch) {
  if (batch.draws.empty())
    throw std::invalid_argument("empirical_measure: empty batch");
  std::vector<double> sorted(batch.draws);
  std::sort(sorted.begin(), sorted.end());
  const double N = static_cast<double>(sorted.size());
  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.push_back(sorted[i]);
    weights.push_back(static_cast<double>(j - i) / N);
    i = j;
  }
  return DiscreteMeasure1D(std::move(atoms), std::move(weights));
}

FiniteMeasure2D empirical_measure(const SampleBatch2D& batch, const Grid1D& gx,
                                  const Grid1D& gy) {
  if (batch.draws.empty())
    throw std::invalid_argument("empirical_measure: empty batch");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(gx.n) * gy.n, 0);
  for (const auto& xy : batch.draws) {
    const int i = grid_index_of(gx, xy[0]);
    const int j = grid_index_of(gy, xy[1]);
    ++counts[static_cast<std::size_t>(i) * gy.n + j];
  }
  const double N = static_cast<double>(batch.draws.size());
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / N;
  return FiniteMeasure2D(gx, gy, std::move(p));
}

SampleBatch quantize_sample(const SampleBatch& batch, int n) {
  if (n < 1) throw std::invalid_argument("quantize_sample: n < 1");
  SampleBatch out;
  out.seed = batch.seed;
  out.draws.reserve(batch.draws.size());
  for (double x : batch.draws) {
    out.draws.push_back(x >= 1.0 ? 1.0
                                 : std::floor(n * x) / static_cast<double>(n));
  }
  return out;
}

}  // namespace wq::measures
