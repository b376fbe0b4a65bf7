#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wq/confidence.hpp"
#include "wq/measures.hpp"
#include "wq/rng.hpp"

using namespace wq;
using namespace wq::confidence;
using namespace wq::measures;

TEST_CASE("radius_k against the inverse-erf oracle values") {
  CHECK(radius_k(0.0) == 0.0);
  CHECK(radius_k(0.95) == doctest::Approx(0.9799819922700271).epsilon(1e-10));
  CHECK(radius_k(0.90) == doctest::Approx(0.8224268134757364).epsilon(1e-10));
  CHECK_THROWS(radius_k(1.0));
  CHECK_THROWS(radius_k(-0.1));
  CHECK_THROWS(radius_k(1.5));
}

TEST_CASE("radius_k is strictly increasing and inverts the tail identity") {
  double prev = -1.0;
  for (double a = 0.0; a < 0.999; a += 0.01) {
    const double k = radius_k(a);
    CHECK(k > prev);
    prev = k;
    // 2 - 2 Phi(2k) = 1 - alpha within 1e-9
    CHECK(normal_tail_2m2phi(k) == doctest::Approx(1.0 - a).epsilon(1e-9));
  }
}

TEST_CASE("normal tail identity boundary values") {
  CHECK(normal_tail_2m2phi(0.0) == doctest::Approx(1.0));
  CHECK(normal_tail_2m2phi(0.9799819922700271) == doctest::Approx(0.05).epsilon(1e-9));
  double prev = 1.0;
  for (double t = 0.1; t < 6.0; t += 0.1) {
    const double cur = normal_tail_2m2phi(t);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(normal_tail_2m2phi(40.0) == doctest::Approx(0.0));
  CHECK_THROWS(normal_tail_2m2phi(-0.5));
}

TEST_CASE("the empirical measure itself is contained with margin = radius") {
  SampleBatch batch;
  batch.draws = {0.1, 0.4, 0.4, 0.8};
  const auto res =
      region_contains(batch, Measure1D(empirical_measure(batch)), 0.95);
  CHECK(res.contained);
  CHECK(res.distance == 0.0);
  CHECK(res.margin == doctest::Approx(res.radius));
}

TEST_CASE("a singleton at 0 excludes the point mass at 1") {
  SampleBatch batch;
  batch.draws = {0.0};
  const auto res = region_contains(
      batch, Measure1D(DiscreteMeasure1D({1.0}, {1.0})), 0.95);
  CHECK(!res.contained);
  CHECK(res.distance == doctest::Approx(1.0));
  CHECK(res.margin < 0.0);
}

TEST_CASE("coverage at the extremal two-point law is near the nominal level") {
  // P^1 attains the asymptotic law |B(1/2)| exactly in the limit
  const Measure1D P = MixtureMeasure(1.0);
  const auto res = coverage_sim(P, 2000, 0.95, 400, 17);
  CHECK(res.coverage >= 0.90);
  CHECK(res.ci_lo <= res.coverage);
  CHECK(res.ci_hi >= res.coverage);
  CHECK(!res.asymptotic_warning);
}

TEST_CASE("coverage for the uniform is conservative") {
  const Measure1D P = MixtureMeasure(0.0);
  const auto res = coverage_sim(P, 2000, 0.95, 300, 18);
  CHECK(res.coverage >= 0.95);
}

TEST_CASE("mid-alpha runs carry the asymptotic validity warning") {
  const Measure1D P = MixtureMeasure(0.5);
  const auto res = coverage_sim(P, 200, 0.5, 100, 19);
  CHECK(res.asymptotic_warning);
}

TEST_CASE("coverage is nondecreasing in alpha within joint error bars") {
  const Measure1D P = MixtureMeasure(0.5);
  double prev = -1.0, prev_se = 0.0;
  for (double a : {0.8, 0.9, 0.95, 0.99}) {
    const auto res = coverage_sim(P, 1000, a, 300, 20);
    const double se = (res.ci_hi - res.ci_lo) / (2.0 * 2.5758);
    if (prev >= 0.0)
      CHECK(res.coverage >= prev - 2.0 * std::hypot(se, prev_se));
    prev = res.coverage;
    prev_se = se;
  }
}

TEST_CASE("coverage_sim validates inputs") {
  CHECK_THROWS(coverage_sim(Measure1D(MixtureMeasure(0.0)), 100, 0.95, 50, 1));
  CHECK_THROWS(coverage_sim(Measure1D(MixtureMeasure(0.0)), 0, 0.95, 200, 1));
}

TEST_CASE("lipschitz interval for the identity function") {
  SampleBatch batch;
  RngStream rng(21, 0);
  for (int i = 0; i < 100; ++i) batch.draws.push_back(rng.next_double());
  LipschitzTable id;
  id.xs = {0.0, 1.0};
  id.ys = {0.0, 1.0};
  const auto iv = lipschitz_mean_bounds(batch, id, 0.95);
  CHECK(iv.halfwidth == doctest::Approx(0.09799819922700271).epsilon(1e-9));
  CHECK(iv.hi - iv.lo == doctest::Approx(2 * iv.halfwidth));
  CHECK(iv.uniform_over_lip1);
}

TEST_CASE("constant functions give an interval centered at the constant") {
  SampleBatch batch;
  batch.draws = {0.2, 0.4, 0.9};
  LipschitzTable c;
  c.xs = {0.0, 1.0};
  c.ys = {0.77, 0.77};
  const auto iv = lipschitz_mean_bounds(batch, c, 0.9);
  CHECK(iv.mean == doctest::Approx(0.77));
  CHECK(iv.lo == doctest::Approx(0.77 - iv.halfwidth));
}

TEST_CASE("alpha = 0 collapses the interval to the sample mean") {
  SampleBatch batch;
  batch.draws = {0.25, 0.75};
  LipschitzTable id;
  id.xs = {0.0, 1.0};
  id.ys = {0.0, 1.0};
  const auto iv = lipschitz_mean_bounds(batch, id, 0.0);
  CHECK(iv.halfwidth == 0.0);
  CHECK(iv.lo == iv.hi);
}

TEST_CASE("Lipschitz violations are rejected naming the breakpoint pair") {
  SampleBatch batch;
  batch.draws = {0.5};
  LipschitzTable bad;
  bad.xs = {0.0, 0.5, 1.0};
  bad.ys = {0.0, 0.9, 0.8};  // slope 1.8 on the first segment
  CHECK_THROWS_WITH_AS(lipschitz_mean_bounds(batch, bad, 0.9),
                       doctest::Contains("0.5"), std::invalid_argument);
}

TEST_CASE("worst-case ordering across the mixture family") {
  // coverage at P^1 <= coverage at P^0.5 <= coverage at U[0,1], within 2 SE
  const int N = 2000, reps = 300;
  const auto c1 = coverage_sim(Measure1D(MixtureMeasure(1.0)), N, 0.95, reps, 23);
  const auto ch = coverage_sim(Measure1D(MixtureMeasure(0.5)), N, 0.95, reps, 23);
  const auto c0 = coverage_sim(Measure1D(MixtureMeasure(0.0)), N, 0.95, reps, 23);
  const auto se = [](const CoverageResult& r) {
    return (r.ci_hi - r.ci_lo) / (2.0 * 2.5758);
  };
  CHECK(c1.coverage <= ch.coverage + 2.0 * std::hypot(se(c1), se(ch)));
  CHECK(ch.coverage <= c0.coverage + 2.0 * std::hypot(se(ch), se(c0)));
}
