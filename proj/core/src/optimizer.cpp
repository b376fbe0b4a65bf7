#include "wq/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wq/parallel.hpp"
#include "wq/quantiles.hpp"
#include "wq/rng.hpp"
#include "wq/stats.hpp"
#include "wq/transport.hpp"

namespace wq::optimizer {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt + 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

measures::FiniteMeasure2D simplex_to_measure(const Eigen::VectorXd& theta,
                                             int nx, int ny) {
  const int cells = nx * ny;
  if (theta.size() != cells - 1)
    throw std::invalid_argument("simplex_to_measure: theta dimension mismatch");
  Eigen::VectorXd logits(cells);
  logits.head(cells - 1) = theta;
  logits(cells - 1) = 0.0;
  const double top = logits.maxCoeff();
  Eigen::VectorXd w = (logits.array() - top).exp();
  w /= w.sum();
  // make the simplex sum exact
  std::vector<double> p(w.data(), w.data() + cells);
  double s = std::accumulate(p.begin(), p.end(), 0.0);
  p[static_cast<std::size_t>(cells - 1)] += 1.0 - s;
  if (p[static_cast<std::size_t>(cells - 1)] < 0.0) {
    p[static_cast<std::size_t>(cells - 1)] = 0.0;
    p = measures::renormalized(p);
  }
  return measures::FiniteMeasure2D(measures::Grid1D(nx), measures::Grid1D(ny),
                                   std::move(p));
}

Eigen::VectorXd measure_to_theta(const measures::FiniteMeasure2D& m) {
  const auto p = m.p();
  const double last = p.back();
  if (last <= 0.0)
    throw std::invalid_argument("measure_to_theta: needs interior p");
  Eigen::VectorXd theta(static_cast<Eigen::Index>(p.size()) - 1);
  for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(p.size()); ++i) {
    if (p[i] <= 0.0)
      throw std::invalid_argument("measure_to_theta: needs interior p");
    theta(i) = std::log(p[i] / last);
  }
  return theta;
}

double objective_quantile(const measures::FiniteMeasure2D& p, int N, int M,
                          double alpha, std::uint64_t seed, int threads) {
  if (N < 1 || M < 1)
    throw std::invalid_argument("objective_quantile: N and M must be >= 1");
  std::vector<double> dists(static_cast<std::size_t>(M));
  parallel_for(0, M, threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      RngStream rng(seed, static_cast<std::uint64_t>(r));
      const auto batch = measures::sample(p, N, rng);
      const auto emp =
          measures::empirical_measure(batch, p.grid_x(), p.grid_y());
      dists[static_cast<std::size_t>(r)] = transport::w1_grid_lp(emp, p).distance;
    }
  });
  std::sort(dists.begin(), dists.end());
  return quantiles::quantile_of_sorted(dists, alpha).value;
}

namespace {

double kernel(const GpHyper& h, const Eigen::VectorXd& a,
              const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double r = (a(d) - b(d)) / h.length_scales(d);
    s += r * r;
  }
  return h.signal_var * std::exp(-0.5 * s);
}

// Cholesky of K + (noise + jitter) I; escalates jitter relative to the
// signal variance until the factorization succeeds.
bool factor_kernel(const Eigen::MatrixXd& X, const GpHyper& h,
                   Eigen::MatrixXd& L, double& jitter_used) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel(h, X.row(i), X.row(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  for (double rel : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
    const double jitter = rel * std::max(h.signal_var, 1e-12);
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += h.noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
      jitter_used = jitter;
      return true;
    }
  }
  return false;
}

double log_marginal(const Eigen::MatrixXd& L, const Eigen::VectorXd& r,
                    const Eigen::VectorXd& alpha) {
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) logdet += std::log(L(i, i));
  return -0.5 * r.dot(alpha) - logdet -
         0.5 * static_cast<double>(L.rows()) * std::log(2.0 * M_PI);
}

struct FitEval {
  bool ok = false;
  double lml = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd L;
  Eigen::VectorXd alpha;
  double jitter = 0.0;
};

FitEval evaluate_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                       const GpHyper& h) {
  FitEval ev;
  if (!factor_kernel(X, h, ev.L, ev.jitter)) return ev;
  ev.alpha = ev.L.transpose().triangularView<Eigen::Upper>().solve(
      ev.L.triangularView<Eigen::Lower>().solve(r));
  ev.lml = log_marginal(ev.L, r, ev.alpha);
  ev.ok = std::isfinite(ev.lml);
  return ev;
}

}  // namespace

GPSurrogate gp_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const GpHyper& init) {
  if (X.rows() < 2 || X.rows() != y.size())
    throw std::invalid_argument("gp_fit: need >= 2 observations");
  const Eigen::Index n = X.rows();
  const Eigen::Index D = X.cols();

  GPSurrogate model;
  model.X = X;
  model.y = y;
  model.y_mean = y.mean();
  const Eigen::VectorXd r = y.array() - model.y_mean;

  const double y_var = std::max((r.array().square().sum()) /
                                    std::max<double>(1.0, double(n - 1)),
                                1e-12);
  Eigen::VectorXd span(D);
  for (Eigen::Index d = 0; d < D; ++d) {
    const double lo = X.col(d).minCoeff(), hi = X.col(d).maxCoeff();
    span(d) = std::max(hi - lo, 1e-3);
  }
  const double noise_floor = 1e-10 * y_var;

  // multi-start grid (isotropic scale multipliers), init included
  std::vector<GpHyper> starts;
  if (init.length_scales.size() == D) starts.push_back(init);
  for (double sf : {0.25, 1.0, 4.0})
    for (double lf : {0.1, 0.3, 1.0})
      for (double nf : {1e-4, 1e-2, 0.25}) {
        GpHyper h;
        h.signal_var = sf * y_var;
        h.length_scales = span * lf;
        h.noise_var =
            init.fix_noise ? init.noise_var : std::max(nf * y_var, noise_floor);
        h.fix_noise = init.fix_noise;
        starts.push_back(h);
      }

  GpHyper best_h = starts.front();
  FitEval best;
  for (const auto& h : starts) {
    const auto ev = evaluate_hyper(X, r, h);
    if (ev.ok && ev.lml > best.lml) {
      best = ev;
      best_h = h;
    }
  }
  if (!best.ok)
    throw std::runtime_error("gp_fit: kernel matrix not positive definite");

  // coordinate descent in log space
  const std::vector<double> mults = {0.4, 0.67, 1.5, 2.5};
  const int num_params = static_cast<int>(D) + (best_h.fix_noise ? 1 : 2);
  for (int sweep = 0; sweep < 4; ++sweep) {
    bool improved = false;
    for (int param = 0; param < num_params; ++param) {
      for (double mult : mults) {
        GpHyper h = best_h;
        if (param == 0)
          h.signal_var *= mult;
        else if (param <= D)
          h.length_scales(param - 1) *= mult;
        else
          h.noise_var = std::max(h.noise_var * mult, noise_floor);
        const auto ev = evaluate_hyper(X, r, h);
        if (ev.ok && ev.lml > best.lml + 1e-9) {
          best = ev;
          best_h = h;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  model.hyper = best_h;
  model.chol = best.L;
  model.alpha = best.alpha;
  model.jitter = best.jitter;
  model.log_marginal = best.lml;
  return model;
}

Posterior gp_posterior(const GPSurrogate& model, const Eigen::VectorXd& x) {
  const Eigen::Index n = model.X.rows();
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i)
    kstar(i) = kernel(model.hyper, model.X.row(i), x);
  const double mean = model.y_mean + kstar.dot(model.alpha);
  const Eigen::VectorXd w =
      model.chol.triangularView<Eigen::Lower>().solve(kstar);
  const double var = std::max(model.hyper.signal_var - w.squaredNorm(), 0.0);
  return {mean, var};
}

double expected_improvement(double mean, double variance, double best_so_far) {
  if (variance < 0.0)
    throw std::invalid_argument("expected_improvement: negative variance");
  const double sigma = std::sqrt(variance);
  const double diff = mean - best_so_far;
  if (sigma < 1e-12) return std::max(diff, 0.0);
  const double z = diff / sigma;
  return diff * stats::normal_cdf(z) + sigma * stats::normal_pdf(z);
}

namespace {

constexpr double kBoxHalf = 6.0;  // initial design box [-6, 6]^D

// Compass pattern search maximizing fn, starting at x0.
Eigen::VectorXd pattern_search(const Eigen::VectorXd& x0,
                               const std::function<double(const Eigen::VectorXd&)>& fn,
                               double* value_out) {
  Eigen::VectorXd x = x0;
  double fx = fn(x);
  double step = 1.5;
  while (step > 0.02) {
    bool moved = false;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      for (double s : {step, -step}) {
        Eigen::VectorXd cand = x;
        cand(d) = std::clamp(cand(d) + s, -2.0 * kBoxHalf, 2.0 * kBoxHalf);
        const double fc = fn(cand);
        if (fc > fx + 1e-15) {
          x = cand;
          fx = fc;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  *value_out = fx;
  return x;
}

}  // namespace

OptimizeResult optimize(int nx, int ny, int N, int M, double alpha, int budget,
                        std::uint64_t seed, int threads) {
  const int D = nx * ny - 1;
  if (D < 1) throw std::invalid_argument("optimize: grid too small");
  const int n_init = std::min(5 * D, 50);
  if (budget < n_init)
    throw std::invalid_argument("optimize: budget below initial design size " +
                                std::to_string(n_init));

  // Latin hypercube over [-kBoxHalf, kBoxHalf]^D
  RngStream design_rng(seed, 0x4c485344u);  // design stream
  Eigen::MatrixXd X(budget, D);
  for (int d = 0; d < D; ++d) {
    std::vector<int> strata(static_cast<std::size_t>(n_init));
    std::iota(strata.begin(), strata.end(), 0);
    for (int i = n_init - 1; i > 0; --i) {
      const int j = static_cast<int>(design_rng.next_u64() %
                                     static_cast<std::uint64_t>(i + 1));
      std::swap(strata[static_cast<std::size_t>(i)],
                strata[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < n_init; ++i) {
      const double u =
          (strata[static_cast<std::size_t>(i)] + design_rng.next_double()) /
          static_cast<double>(n_init);
      X(i, d) = -kBoxHalf + 2.0 * kBoxHalf * u;
    }
  }

  Eigen::VectorXd y(budget);
  parallel_for(0, n_init, threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const auto p = simplex_to_measure(X.row(i).transpose(), nx, ny);
      y(i) = objective_quantile(
          p, N, M, alpha, derive_seed(seed, static_cast<std::uint64_t>(i)), 1);
    }
  });

  OptimizeResult res;
  res.trace.reserve(static_cast<std::size_t>(budget));
  double incumbent = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_init; ++i) {
    incumbent = std::max(incumbent, y(i));
    res.trace.push_back({i, X.row(i).transpose(), y(i), incumbent});
  }

  GPSurrogate model;
  for (int eval = n_init; eval < budget; ++eval) {
    GpHyper init = model.hyper;  // warm start after the first fit
    model = gp_fit(X.topRows(eval), y.head(eval), init);

    // noise-adjusted incumbent: best posterior mean at observed inputs
    double best_mean = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < eval; ++i)
      best_mean =
          std::max(best_mean, gp_posterior(model, X.row(i).transpose()).mean);

    const auto ei = [&](const Eigen::VectorXd& x) {
      const auto post = gp_posterior(model, x);
      return expected_improvement(post.mean, post.variance, best_mean);
    };

    // multi-start acquisition search: top observed points, perturbations of
    // the best, and fresh uniform points
    RngStream acq_rng(seed, 0xACC00000ull + static_cast<std::uint64_t>(eval));
    std::vector<Eigen::VectorXd> starts;
    {
      std::vector<int> order(static_cast<std::size_t>(eval));
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return y(a) > y(b); });
      for (int t = 0; t < std::min(3, eval); ++t)
        starts.push_back(X.row(order[static_cast<std::size_t>(t)]).transpose());
      for (int t = 0; t < 3; ++t) {
        Eigen::VectorXd pert = starts.front();
        for (Eigen::Index d = 0; d < D; ++d)
          pert(d) += 0.75 * acq_rng.next_normal();
        starts.push_back(pert);
      }
      for (int t = 0; t < 6; ++t) {
        Eigen::VectorXd u(D);
        for (Eigen::Index d = 0; d < D; ++d)
          u(d) = -kBoxHalf + 2.0 * kBoxHalf * acq_rng.next_double();
        starts.push_back(u);
      }
    }

    Eigen::VectorXd best_x = starts.front();
    double best_ei = -1.0;
    for (const auto& s : starts) {
      double v = 0.0;
      const Eigen::VectorXd x = pattern_search(s, ei, &v);
      if (v > best_ei) {
        best_ei = v;
        best_x = x;
      }
    }
    if (best_ei <= 1e-16) {
      // acquisition is flat; explore a fresh random point
      for (Eigen::Index d = 0; d < D; ++d)
        best_x(d) = -kBoxHalf + 2.0 * kBoxHalf * acq_rng.next_double();
    }

    const auto p = simplex_to_measure(best_x, nx, ny);
    const double value = objective_quantile(
        p, N, M, alpha, derive_seed(seed, static_cast<std::uint64_t>(eval)),
        threads);
    X.row(eval) = best_x.transpose();
    y(eval) = value;
    incumbent = std::max(incumbent, value);
    res.trace.push_back({eval, best_x, value, incumbent});
  }

  int best_idx = 0;
  for (int i = 1; i < budget; ++i)
    if (y(i) > y(best_idx)) best_idx = i;
  res.best_theta = X.row(best_idx).transpose();
  res.best_value = y(best_idx);
  res.surrogate = gp_fit(X, y, model.hyper);
  return res;
}

}  // namespace wq::optimizer
