#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "wq/rng.hpp"

namespace wq::measures {

/// Tolerance for the probability-simplex invariant sum(p) == 1.
inline constexpr double kSimplexTol = 1e-12;

/// Equidistant grid x_i = i/(n-1) on [0,1], i = 0..n-1.
struct Grid1D {
  int n;

  explicit Grid1D(int n_points);
  double point(int i) const { return static_cast<double>(i) / (n - 1); }
  double spacing() const { return 1.0 / (n - 1); }
  bool operator==(const Grid1D&) const = default;
};

/// Throws std::invalid_argument unless p is a probability vector
/// (entries in [0,1], sum within kSimplexTol of 1).
void ensure_probability_vector(std::span<const double> p);

/// Explicit renormalization helper: rescales a nonnegative vector to sum 1.
/// Entries in [-kSimplexTol, 0) are clamped to zero; anything more negative
/// is rejected. Never applied implicitly.
std::vector<double> renormalized(std::span<const double> p);

/// Probability vector on an equidistant grid.
class FiniteMeasure1D {
 public:
  FiniteMeasure1D(Grid1D grid, std::vector<double> p);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> p() const { return p_; }
  std::span<const double> cumulative() const { return cum_; }

 private:
  Grid1D grid_;
  std::vector<double> p_;
  std::vector<double> cum_;  // cum_[i] = p_0 + ... + p_i
};

/// Atoms at arbitrary sorted positions in [0,1]; duplicates merged.
/// This is the representation of raw empirical supports.
class DiscreteMeasure1D {
 public:
  DiscreteMeasure1D(std::vector<double> atoms, std::vector<double> weights);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> weights() const { return w_; }
  std::span<const double> cumulative() const { return cum_; }

 private:
  std::vector<double> atoms_;
  std::vector<double> w_;
  std::vector<double> cum_;
};

/// lambda * (delta_0 + delta_1)/2 + (1 - lambda) * Uniform[0,1].
class MixtureMeasure {
 public:
  explicit MixtureMeasure(double lambda);
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

using Measure1D = std::variant<FiniteMeasure1D, DiscreteMeasure1D, MixtureMeasure>;

/// Probability matrix on the Cartesian product of two equidistant grids,
/// row-major with the x index major: p[i*ny + j] = mass at (x_i, y_j).
class FiniteMeasure2D {
 public:
  FiniteMeasure2D(Grid1D grid_x, Grid1D grid_y, std::vector<double> p);

  const Grid1D& grid_x() const { return gx_; }
  const Grid1D& grid_y() const { return gy_; }
  std::span<const double> p() const { return p_; }
  double at(int i, int j) const { return p_[static_cast<std::size_t>(i) * gy_.n + j]; }

 private:
  Grid1D gx_;
  Grid1D gy_;
  std::vector<double> p_;
};

struct SampleBatch {
  std::vector<double> draws;
  std::uint64_t seed = 0;  // provenance of the generating stream
};

struct SampleBatch2D {
  std::vector<std::array<double, 2>> draws;
  std::uint64_t seed = 0;
};

/// Right-continuous CDF value at t; t is clamped into [0,1].
double cdf_eval(const FiniteMeasure1D& m, double t);
double cdf_eval(const DiscreteMeasure1D& m, double t);
double cdf_eval(const MixtureMeasure& m, double t);
double cdf_eval(const Measure1D& m, double t);

/// q_i = p_1 + ... + p_i for i = 1..n-1 (length n-1). Validates p.
std::vector<double> cumulative_q(std::span<const double> p);

/// N i.i.d. draws. Finite/discrete measures sample by inverse CDF over atoms;
/// the mixture draws a lambda-coin, then either the fair atom pair {0,1} or a
/// uniform. Every sample consumes a fixed number of rng draws.
SampleBatch sample(const FiniteMeasure1D& m, int N, RngStream& rng);
SampleBatch sample(const DiscreteMeasure1D& m, int N, RngStream& rng);
SampleBatch sample(const MixtureMeasure& m, int N, RngStream& rng);
SampleBatch sample(const Measure1D& m, int N, RngStream& rng);
SampleBatch2D sample(const FiniteMeasure2D& m, int N, RngStream& rng);

/// Empirical measure on a grid: every draw must sit on a grid point
/// (within 1e-9), weights are relative frequencies.
FiniteMeasure1D empirical_measure(const SampleBatch& batch, const Grid1D& grid);

/// Grid-free empirical measure: atoms at the sorted distinct draw positions.
DiscreteMeasure1D empirical_measure(const SampleBatch& batch);

/// 2-D empirical measure on the given grid pair.
FiniteMeasure2D empirical_measure(const SampleBatch2D& batch, const Grid1D& gx,
                                  const Grid1D& gy);

/// Quantization map x -> floor(n*x)/n; x = 1 stays at 1 so the support
/// remains inside [0,1]. Note the 1/n lattice differs from the Grid1D
/// convention i/(n-1); the two are never mixed silently.
SampleBatch quantize_sample(const SampleBatch& batch, int n);

}  // namespace wq::measures
