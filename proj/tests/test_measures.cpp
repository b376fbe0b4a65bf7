#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wq/measure_io.hpp"
#include "wq/measures.hpp"
#include "wq/transport.hpp"

using namespace wq;
using namespace wq::measures;

TEST_CASE("cdf_eval on the mixture family") {
  CHECK(cdf_eval(MixtureMeasure(0.5), 0.2) == doctest::Approx(0.35));
  CHECK(cdf_eval(MixtureMeasure(1.0), 0.5) == doctest::Approx(0.5));
  CHECK(cdf_eval(MixtureMeasure(0.3), -2.0) == 0.0);
  CHECK(cdf_eval(MixtureMeasure(0.3), 2.0) == 1.0);
  CHECK(cdf_eval(MixtureMeasure(0.4), 0.0) == doctest::Approx(0.2));
  CHECK(cdf_eval(MixtureMeasure(0.4), 1.0) == 1.0);
}

TEST_CASE("cdf_eval on grid measures counts mass up to t") {
  const FiniteMeasure1D m(Grid1D(3), {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(cdf_eval(m, 0.6) == doctest::Approx(2.0 / 3));
  CHECK(cdf_eval(m, 0.0) == doctest::Approx(1.0 / 3));
  CHECK(cdf_eval(m, 0.49) == doctest::Approx(1.0 / 3));
  CHECK(cdf_eval(m, 0.5) == doctest::Approx(2.0 / 3));
}

TEST_CASE("cdf_eval is monotone nondecreasing in t") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(5);
    double s = 0.0;
    for (auto& v : p) s += (v = rng.next_open());
    for (auto& v : p) v /= s;
    const Measure1D ms[] = {Measure1D(FiniteMeasure1D(Grid1D(5), renormalized(p))),
                            Measure1D(MixtureMeasure(rng.next_double()))};
    for (const auto& m : ms) {
      double a = rng.next_double() * 1.4 - 0.2;
      double b = rng.next_double() * 1.4 - 0.2;
      if (a > b) std::swap(a, b);
      CHECK(cdf_eval(m, a) <= cdf_eval(m, b) + 1e-15);
    }
  }
}

TEST_CASE("cumulative_q partial sums") {
  CHECK(cumulative_q(std::vector<double>{0.5, 0.0, 0.5}) ==
        std::vector<double>{0.5, 0.5});
  const auto q = cumulative_q(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(q[0] == doctest::Approx(1.0 / 3));
  CHECK(q[1] == doctest::Approx(2.0 / 3));
  CHECK(cumulative_q(std::vector<double>{1.0, 0.0}) == std::vector<double>{1.0});
  CHECK_THROWS(cumulative_q(std::vector<double>{0.5, 0.4}));
  CHECK_THROWS(cumulative_q(std::vector<double>{-0.1, 1.1}));
}

TEST_CASE("cumulative_q inverts successive differencing") {
  RngStream rng(12, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(7);
    double s = 0.0;
    for (auto& v : p) s += (v = rng.next_open());
    for (auto& v : p) v /= s;
    p = renormalized(p);
    const auto q = cumulative_q(p);
    CHECK(q.front() == doctest::Approx(p.front()));
    for (std::size_t i = 1; i < q.size(); ++i)
      CHECK(q[i] - q[i - 1] == doctest::Approx(p[i]).epsilon(1e-9));
    CHECK(1.0 - q.back() == doctest::Approx(p.back()).epsilon(1e-9));
  }
}

TEST_CASE("sampling a point mass yields constant draws") {
  RngStream rng(1, 0);
  const FiniteMeasure1D delta0(Grid1D(2), {1.0, 0.0});
  const auto batch = sample(delta0, 5, rng);
  for (double x : batch.draws) CHECK(x == 0.0);
}

TEST_CASE("mixture lambda=1 splits mass evenly between the endpoints") {
  RngStream rng(2, 0);
  const int N = 10000;
  const auto batch = sample(MixtureMeasure(1.0), N, rng);
  int zeros = 0;
  for (double x : batch.draws) {
    CHECK((x == 0.0 || x == 1.0));
    zeros += x == 0.0;
  }
  // binomial oracle: 3 sigma band around 1/2
  const double tol = 3.0 * std::sqrt(0.25 / N);
  CHECK(std::abs(static_cast<double>(zeros) / N - 0.5) < tol);
}

TEST_CASE("mixture lambda=0 draws pass a KS test against the uniform") {
  RngStream rng(3, 0);
  const int N = 10000;
  const auto batch = sample(MixtureMeasure(0.0), N, rng);
  // 0.999 quantile of the Kolmogorov limit law
  const double crit = 1.949474603504375 / std::sqrt(static_cast<double>(N));
  CHECK(oracles::ks_vs_uniform(batch.draws) < crit);
}

TEST_CASE("sampling is reproducible for a fixed (measure, N, seed) key") {
  const MixtureMeasure m(0.35);
  RngStream a(99, 5), b(99, 5);
  const auto ba = sample(m, 1000, a);
  const auto bb = sample(m, 1000, b);
  CHECK(ba.draws == bb.draws);
}

TEST_CASE("empirical measure on a grid uses relative frequencies") {
  SampleBatch batch;
  batch.draws = {0.0, 0.0, 1.0, 1.0};
  const auto m = empirical_measure(batch, Grid1D(2));
  CHECK(m.p()[0] == doctest::Approx(0.5));
  CHECK(m.p()[1] == doctest::Approx(0.5));

  batch.draws = {0.0, 0.0, 0.0, 1.0};
  const auto m2 = empirical_measure(batch, Grid1D(2));
  CHECK(m2.p()[0] == doctest::Approx(0.75));
  CHECK(m2.p()[1] == doctest::Approx(0.25));
}

TEST_CASE("grid-free empirical measure keeps the raw support") {
  SampleBatch batch;
  batch.draws = {0.37};
  const auto m = empirical_measure(batch);
  REQUIRE(m.atoms().size() == 1);
  CHECK(m.atoms()[0] == 0.37);
  CHECK(m.weights()[0] == 1.0);
}

TEST_CASE("off-grid draws are rejected when a grid is supplied") {
  SampleBatch batch;
  batch.draws = {0.37};
  CHECK_THROWS(empirical_measure(batch, Grid1D(2)));
}

TEST_CASE("quantization map floors to the 1/n lattice, closing at 1") {
  SampleBatch batch;
  batch.draws = {0.37, 1.0, 0.0, 0.9999};
  const auto q = quantize_sample(batch, 10);
  CHECK(q.draws[0] == doctest::Approx(0.3));
  CHECK(q.draws[1] == 1.0);
  CHECK(q.draws[2] == 0.0);
  CHECK(q.draws[3] == doctest::Approx(0.9));
}

TEST_CASE("quantization moves no point further than 1/n") {
  RngStream rng(4, 0);
  for (int n : {1, 3, 10, 97}) {
    const auto batch = sample(MixtureMeasure(0.2), 500, rng);
    const auto q = quantize_sample(batch, n);
    for (std::size_t i = 0; i < batch.draws.size(); ++i)
      CHECK(std::abs(batch.draws[i] - q.draws[i]) <= 1.0 / n + 1e-15);
  }
}

TEST_CASE("quantization contracts W1 between empirical measures by <= 1/n") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto batch = sample(MixtureMeasure(0.5), 200, rng);
    for (int n : {2, 5, 20}) {
      const auto emp = empirical_measure(batch);
      const auto empq = empirical_measure(quantize_sample(batch, n));
      CHECK(transport::w1_1d(emp, empq) <= 1.0 / n + 1e-12);
    }
  }
}

TEST_CASE("measure JSON round-trips") {
  const Measure1D m1 = FiniteMeasure1D(Grid1D(4), {0.1, 0.2, 0.3, 0.4});
  const auto r1 = measure1d_from_json(to_json(m1));
  const auto& f1 = std::get<FiniteMeasure1D>(r1);
  CHECK(f1.grid().n == 4);
  CHECK(f1.p()[3] == doctest::Approx(0.4));

  const Measure1D m2 = MixtureMeasure(0.75);
  const auto r2 = measure1d_from_json(to_json(m2));
  CHECK(std::get<MixtureMeasure>(r2).lambda() == doctest::Approx(0.75));

  const FiniteMeasure2D m3(Grid1D(2), Grid1D(3),
                           {0.1, 0.2, 0.1, 0.2, 0.2, 0.2});
  const auto r3 = measure2d_from_json(to_json(m3));
  CHECK(r3.grid_x().n == 2);
  CHECK(r3.grid_y().n == 3);
  CHECK(r3.at(1, 2) == doctest::Approx(0.2));
}

TEST_CASE("malformed measure JSON is rejected with a validation error") {
  CHECK_THROWS_AS(measure1d_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(measure1d_from_json(R"({"kind":"nope"})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(measure1d_from_json(R"({"kind":"finite1d","n":3,"p":[1.0]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      measure1d_from_json(R"({"kind":"mixture","lambda":1.5})"),
      std::invalid_argument);
}

TEST_CASE("sample CSV round-trips draws and seed") {
  SampleBatch batch;
  batch.seed = 424242;
  batch.draws = {0.125, 1.0, 0.333333333333333315};
  const auto parsed = sample_batch_from_csv(to_csv(batch));
  CHECK(parsed.seed == 424242);
  CHECK(parsed.draws == batch.draws);
}

TEST_CASE("simplex invariant is enforced at 1e-12 with explicit renormalization") {
  CHECK_THROWS(FiniteMeasure1D(Grid1D(2), {0.5, 0.5 + 1e-9}));
  // within tolerance passes
  CHECK_NOTHROW(FiniteMeasure1D(Grid1D(2), {0.5, 0.5 + 1e-13}));
  const auto fixed = renormalized(std::vector<double>{0.5, 0.6});
  CHECK(fixed[0] + fixed[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(renormalized(std::vector<double>{-0.5, 1.5}));
}
