// End-to-end checks of the wq binary: exit codes, output formats, replay
// determinism. The binary path arrives via the WQ_BIN environment variable.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "wq/measure_io.hpp"
#include "wq/measures.hpp"
#include "wq/rng.hpp"

namespace {

std::string wq_bin() {
  const char* p = std::getenv("WQ_BIN");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string out_file = "/tmp/wq_test_stdout.txt";
  const std::string cmd = wq_bin() + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream f(out_file);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

}  // namespace

TEST_CASE("w1 of a measure with itself prints zero and exits 0") {
  write_file("/tmp/wq_a.json", R"({"kind":"finite1d","n":3,"p":[0.2,0.5,0.3]})");
  const auto res = run("w1 --p /tmp/wq_a.json --q /tmp/wq_a.json");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.substr(0, 2) == "0\n");
}

TEST_CASE("w1 on 2-D measures writes a plan certificate") {
  write_file("/tmp/wq_p2.json",
             R"({"kind":"finite2d","nx":2,"ny":2,"p":[[1.0,0.0],[0.0,0.0]]})");
  write_file("/tmp/wq_q2.json",
             R"({"kind":"finite2d","nx":2,"ny":2,"p":[[0.0,0.0],[0.0,1.0]]})");
  const auto res = run(
      "w1 --p /tmp/wq_p2.json --q /tmp/wq_q2.json --plan /tmp/wq_plan.json");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.substr(0, 2) == "2\n");
  const auto plan = read_file("/tmp/wq_plan.json");
  CHECK(plan.find("\"mass\"") != std::string::npos);
  CHECK(plan.find("\"dual_u\"") != std::string::npos);
}

TEST_CASE("unknown flags exit 2 with usage text") {
  const auto res = run("w1 --nonsense 1");
  CHECK(res.exit_code == 2);
}

TEST_CASE("alpha = 1 in confidence is a validation error, exit 2") {
  wq::measures::SampleBatch batch;
  batch.seed = 5;
  batch.draws = {0.1, 0.5, 0.9};
  wq::measures::save_sample_batch(batch, "/tmp/wq_s.csv");
  const auto res = run("confidence --data /tmp/wq_s.csv --alpha 1.0");
  CHECK(res.exit_code == 2);
  CHECK(res.stdout_text.find("error") != std::string::npos);
}

TEST_CASE("confidence reports k, radius, N, and containment") {
  wq::measures::SampleBatch batch;
  wq::RngStream rng(3, 0);
  for (int i = 0; i < 400; ++i)
    batch.draws.push_back(rng.next_double() < 0.5 ? 0.0 : 1.0);
  wq::measures::save_sample_batch(batch, "/tmp/wq_s2.csv");
  write_file("/tmp/wq_cand.json", R"({"kind":"mixture","lambda":1.0})");
  const auto res = run(
      "confidence --data /tmp/wq_s2.csv --alpha 0.95 --candidate "
      "/tmp/wq_cand.json");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("\"k\"") != std::string::npos);
  CHECK(res.stdout_text.find("\"radius\"") != std::string::npos);
  CHECK(res.stdout_text.find("\"N\": 400") != std::string::npos);
  CHECK(res.stdout_text.find("\"contained\"") != std::string::npos);
}

TEST_CASE("bridge-cdf reruns are byte-identical, thread count irrelevant") {
  write_file("/tmp/wq_u10.json",
             R"({"kind":"finite1d","n":10,"p":[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1]})");
  const std::string base =
      "bridge-cdf --p /tmp/wq_u10.json --t-max 1.0 --t-steps 20 --reps 5000 "
      "--seed 7 --out ";
  auto r1 = run(base + "/tmp/wq_cdf1.csv --threads 1");
  auto r2 = run(base + "/tmp/wq_cdf2.csv --threads 2");
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(read_file("/tmp/wq_cdf1.csv") == read_file("/tmp/wq_cdf2.csv"));
  const auto body = read_file("/tmp/wq_cdf1.csv");
  CHECK(body.find("# config:") != std::string::npos);
  CHECK(body.find("t,F_hat,ci_lo,ci_hi") != std::string::npos);
}

TEST_CASE("coverage emits a validity warning at mid alpha") {
  write_file("/tmp/wq_mix.json", R"({"kind":"mixture","lambda":0.5})");
  const auto res = run(
      "coverage --measure /tmp/wq_mix.json --n-samples 50 --alpha 0.5 "
      "--reps 100 --seed 3");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("warning") != std::string::npos);
  CHECK(res.stdout_text.find("coverage") != std::string::npos);
}

TEST_CASE("lambda-curve csv has the documented columns") {
  const auto res = run(
      "lambda-curve --n 4 --reps 2000 --alphas 0.2:0.8:0.3 --lambda-steps 5 "
      "--seed 2 --out /tmp/wq_lc.csv");
  CHECK(res.exit_code == 0);
  const auto body = read_file("/tmp/wq_lc.csv");
  CHECK(body.find("alpha,lambda_hat,quantile,ci_lo,ci_hi") != std::string::npos);
}

TEST_CASE("tail-compare flags the bound as diagnostic") {
  const auto res = run(
      "tail-compare --p /tmp/wq_u10.json --t-min 0.5 --t-max 1.0 --t-steps 5 "
      "--reps 20000 --seed 4 --out /tmp/wq_tail.csv");
  CHECK(res.exit_code == 0);
  const auto body = read_file("/tmp/wq_tail.csv");
  CHECK(body.find("asymptotic, diagnostic only") != std::string::npos);
  CHECK(body.find("t,mc_tail,ci_lo,ci_hi,l1_bound") != std::string::npos);
}

TEST_CASE("clt-check reports a small Kolmogorov distance on a quick run") {
  const auto res = run(
      "clt-check --n 5 --n-samples 2000 --reps 2000 --bridge-reps 2000 "
      "--seed 6");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("ks_distance") != std::string::npos);
}

TEST_CASE("optimize-2d writes a replayable run file and heatmap") {
  const auto res = run(
      "optimize-2d --nx 2 --ny 2 --alpha 0.9 --n-samples 30 --reps 30 "
      "--budget 16 --seed 9 --out /tmp/wq_run.json --emit-heatmap "
      "/tmp/wq_heat.csv");
  CHECK(res.exit_code == 0);
  const auto body = read_file("/tmp/wq_run.json");
  CHECK(body.find("\"incumbent\"") != std::string::npos);
  CHECK(body.find("\"trace\"") != std::string::npos);
  CHECK(body.find("\"surrogate\"") != std::string::npos);
  const auto heat = read_file("/tmp/wq_heat.csv");
  CHECK(heat.find("# config:") != std::string::npos);
}
