// wq: quantiles of the Wasserstein distance between true and empirical
// measures -- every experiment as a reproducible subcommand.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wq/bridge.hpp"
#include "wq/confidence.hpp"
#include "wq/measure_io.hpp"
#include "wq/measures.hpp"
#include "wq/optimizer.hpp"
#include "wq/parallel.hpp"
#include "wq/quantiles.hpp"
#include "wq/stats.hpp"
#include "wq/transport.hpp"
#include "wq/version.hpp"

using nlohmann::json;
using wq::measures::format_double;

namespace {

struct GlobalOpts {
  int threads = 0;
  std::string format;  // empty = the subcommand's natural default
  std::string out;  // empty = stdout
};

std::string fmt(double v) { return format_double(v); }

// "a:b:step" inclusive range, or a single value
std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> out;
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) {
    out.push_back(std::stod(spec));
    return out;
  }
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("range must be start:end:step, got '" + spec + "'");
  const double start = std::stod(spec.substr(0, c1));
  const double end = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(spec.substr(c2 + 1));
  if (step <= 0.0 || end < start)
    throw std::invalid_argument("bad range '" + spec + "'");
  for (double v = start; v <= end + 1e-12; v += step) out.push_back(v);
  return out;
}

void write_output(const GlobalOpts& g, const std::string& content) {
  if (g.out.empty() || g.out == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  f << content;
}

// header comments carry the full replay config; wall time stays out of the
// data file so reruns are byte-identical
std::string csv_header(const json& config) {
  return "# config: " + config.dump() + "\n# version: " + wq::kVersion + "\n";
}

void print_metadata(const std::string& subcommand, const json& config,
                    double wall_seconds, const std::vector<std::string>& outputs) {
  json meta;
  meta["subcommand"] = subcommand;
  meta["config"] = config;
  meta["version"] = wq::kVersion;
  meta["wall_time_s"] = wall_seconds;
  meta["outputs"] = outputs;
  std::cout << meta.dump() << "\n";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

bool is_finite2d_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const auto j = json::parse(text, nullptr, false);
  return !j.is_discarded() && j.value("kind", "") == "finite2d";
}

json plan_to_json(const wq::transport::TransportPlan& plan) {
  json j;
  j["cost"] = plan.cost;
  json entries = json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"from", {e.from_i, e.from_j}},
                       {"to", {e.to_k, e.to_l}},
                       {"mass", e.mass}});
  }
  j["entries"] = entries;
  j["dual_u"] = plan.dual_u;
  j["dual_v"] = plan.dual_v;
  return j;
}

int cmd_w1(const GlobalOpts& g, const std::string& p_path,
           const std::string& q_path, const std::string& plan_path) {
  Stopwatch watch;
  json config = {{"p", p_path}, {"q", q_path}};
  double distance = 0.0;
  std::vector<std::string> outputs;
  if (is_finite2d_file(p_path) || is_finite2d_file(q_path)) {
    const auto P = wq::measures::load_measure2d(p_path);
    const auto Q = wq::measures::load_measure2d(q_path);
    const auto res = wq::transport::w1_grid_lp(P, Q);
    distance = res.distance;
    if (!plan_path.empty()) {
      std::ofstream f(plan_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + plan_path);
      f << plan_to_json(res.plan).dump(2) << "\n";
      outputs.push_back(plan_path);
    }
  } else {
    if (!plan_path.empty())
      throw std::invalid_argument("--plan is only available for 2-D measures");
    const auto P = wq::measures::load_measure1d(p_path);
    const auto Q = wq::measures::load_measure1d(q_path);
    distance = wq::transport::w1_1d(P, Q);
  }
  if (g.format == "json")
    std::cout << json{{"distance", distance}}.dump() << "\n";
  else
    std::cout << fmt(distance) << "\n";
  print_metadata("w1", config, watch.seconds(), outputs);
  return 0;
}

int cmd_bridge_cdf(const GlobalOpts& g, const std::string& p_path, double t_max,
                   int t_steps, int reps, std::uint64_t seed) {
  Stopwatch watch;
  if (t_max <= 0.0 || t_steps < 1)
    throw std::invalid_argument("need t-max > 0 and t-steps >= 1");
  const auto m = wq::measures::load_measure1d(p_path);
  const auto* fm = std::get_if<wq::measures::FiniteMeasure1D>(&m);
  if (!fm)
    throw std::invalid_argument("bridge-cdf needs a finite1d measure");
  std::vector<double> ts;
  for (int i = 1; i <= t_steps; ++i)
    ts.push_back(t_max * static_cast<double>(i) / t_steps);
  const auto pts =
      wq::bridge::mc_cdf(fm->p(), ts, reps, seed, g.threads);

  json config = {{"subcommand", "bridge-cdf"}, {"p", p_path},
                 {"t_max", t_max},             {"t_steps", t_steps},
                 {"reps", reps},               {"seed", seed}};
  std::string body;
  if (g.format == "json") {
    json rows = json::array();
    for (const auto& pt : pts)
      rows.push_back({{"t", pt.t},
                      {"f_hat", pt.f_hat},
                      {"ci_lo", pt.ci_lo},
                      {"ci_hi", pt.ci_hi}});
    body = json{{"config", config}, {"rows", rows}}.dump(2) + "\n";
  } else {  // csv default
    body = csv_header(config) + "t,F_hat,ci_lo,ci_hi\n";
    for (const auto& pt : pts)
      body += fmt(pt.t) + "," + fmt(pt.f_hat) + "," + fmt(pt.ci_lo) + "," +
              fmt(pt.ci_hi) + "\n";
  }
  write_output(g, body);
  print_metadata("bridge-cdf", config, watch.seconds(),
                 g.out.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{g.out});
  return 0;
}

int cmd_lambda_curve(const GlobalOpts& g, int n, int reps,
                     const std::string& alphas_spec, int lambda_steps,
                     std::uint64_t seed) {
  Stopwatch watch;
  if (lambda_steps < 2) throw std::invalid_argument("need lambda-steps >= 2");
  const auto alphas = parse_range(alphas_spec);
  std::vector<double> lams;
  for (int i = 0; i < lambda_steps; ++i)
    lams.push_back(static_cast<double>(i) / (lambda_steps - 1));
  const auto curve =
      wq::quantiles::lambda_curve(n, alphas, lams, reps, seed, g.threads);

  json config = {{"subcommand", "lambda-curve"}, {"n", n},
                 {"reps", reps},                 {"alphas", alphas_spec},
                 {"lambda_steps", lambda_steps}, {"seed", seed}};
  std::string body;
  if (g.format == "json") {
    json rows = json::array();
    for (std::size_t a = 0; a < curve.alphas.size(); ++a)
      rows.push_back({{"alpha", curve.alphas[a]},
                      {"lambda_hat", curve.lambda_hat[a]},
                      {"quantile", curve.quantile_at_max[a]},
                      {"ci_lo", curve.ci_lo[a]},
                      {"ci_hi", curve.ci_hi[a]}});
    body = json{{"config", config}, {"rows", rows}}.dump(2) + "\n";
  } else {
    body = csv_header(config) + "alpha,lambda_hat,quantile,ci_lo,ci_hi\n";
    for (std::size_t a = 0; a < curve.alphas.size(); ++a)
      body += fmt(curve.alphas[a]) + "," + fmt(curve.lambda_hat[a]) + "," +
              fmt(curve.quantile_at_max[a]) + "," + fmt(curve.ci_lo[a]) + "," +
              fmt(curve.ci_hi[a]) + "\n";
  }
  write_output(g, body);
  print_metadata("lambda-curve", config, watch.seconds(),
                 g.out.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{g.out});
  return 0;
}

int cmd_confidence(const GlobalOpts& g, const std::string& data_path,
                   double alpha, const std::string& candidate_path) {
  Stopwatch watch;
  const auto batch = wq::measures::load_sample_batch(data_path);
  const auto region = wq::confidence::make_region(batch, alpha);
  json result = {{"k", region.k},
                 {"radius", region.radius},
                 {"N", region.N},
                 {"alpha", alpha}};
  if (!candidate_path.empty()) {
    const auto candidate = wq::measures::load_measure1d(candidate_path);
    const auto res = wq::confidence::region_contains(batch, candidate, alpha);
    result["contained"] = res.contained;
    result["margin"] = res.margin;
    result["distance"] = res.distance;
  }
  json config = {{"subcommand", "confidence"},
                 {"data", data_path},
                 {"alpha", alpha},
                 {"candidate", candidate_path}};
  if (g.format == "csv") {
    std::string body = csv_header(config);
    if (result.contains("contained")) {
      body += "k,radius,N,contained,margin,distance\n";
      body += fmt(region.k) + "," + fmt(region.radius) + "," +
              std::to_string(region.N) + "," +
              (result["contained"].get<bool>() ? "1" : "0") + "," +
              fmt(result["margin"].get<double>()) + "," +
              fmt(result["distance"].get<double>()) + "\n";
    } else {
      body += "k,radius,N\n";
      body += fmt(region.k) + "," + fmt(region.radius) + "," +
              std::to_string(region.N) + "\n";
    }
    write_output(g, body);
  } else {
    write_output(g, result.dump(2) + "\n");
  }
  print_metadata("confidence", config, watch.seconds(),
                 g.out.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{g.out});
  return 0;
}

int cmd_coverage(const GlobalOpts& g, const std::string& measure_path,
                 int n_samples, double alpha, int reps, std::uint64_t seed) {
  Stopwatch watch;
  const auto P = wq::measures::load_measure1d(measure_path);
  const auto res =
      wq::confidence::coverage_sim(P, n_samples, alpha, reps, seed, g.threads);
  json config = {{"subcommand", "coverage"}, {"measure", measure_path},
                 {"n_samples", n_samples},   {"alpha", alpha},
                 {"reps", reps},             {"seed", seed}};
  json result = {{"coverage", res.coverage},
                 {"ci_lo", res.ci_lo},
                 {"ci_hi", res.ci_hi},
                 {"reps", res.reps}};
  if (res.asymptotic_warning)
    result["warning"] =
        "the confidence-region guarantee is asymptotic for alpha near 1; "
        "this alpha is outside that regime";
  if (g.format == "csv") {
    std::string body = csv_header(config);
    if (res.asymptotic_warning)
      body += "# warning: asymptotic guarantee holds for alpha near 1\n";
    body += "coverage,ci_lo,ci_hi,reps\n";
    body += fmt(res.coverage) + "," + fmt(res.ci_lo) + "," + fmt(res.ci_hi) +
            "," + std::to_string(res.reps) + "\n";
    write_output(g, body);
  } else {
    write_output(g, result.dump(2) + "\n");
  }
  print_metadata("coverage", config, watch.seconds(),
                 g.out.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{g.out});
  return 0;
}

int cmd_optimize_2d(const GlobalOpts& g, int nx, int ny, double alpha,
                    int n_samples, int reps, int budget, std::uint64_t seed,
                    const std::string& heatmap_path) {
  Stopwatch watch;
  const auto res = wq::optimizer::optimize(nx, ny, n_samples, reps, alpha,
                                           budget, seed, g.threads);
  const auto best_p = wq::optimizer::simplex_to_measure(res.best_theta, nx, ny);

  json config = {{"subcommand", "optimize-2d"}, {"nx", nx},
                 {"ny", ny},                    {"alpha", alpha},
                 {"n_samples", n_samples},      {"reps", reps},
                 {"budget", budget},            {"seed", seed}};
  json run;
  run["config"] = config;
  {
    json incumbent;
    incumbent["value"] = res.best_value;
    incumbent["theta"] = std::vector<double>(
        res.best_theta.data(), res.best_theta.data() + res.best_theta.size());
    json rows = json::array();
    for (int i = 0; i < nx; ++i) {
      std::vector<double> row(static_cast<std::size_t>(ny));
      for (int j = 0; j < ny; ++j) row[static_cast<std::size_t>(j)] = best_p.at(i, j);
      rows.push_back(row);
    }
    incumbent["p"] = rows;
    run["incumbent"] = incumbent;
  }
  {
    json trace = json::array();
    for (const auto& t : res.trace)
      trace.push_back({{"index", t.index},
                       {"value", t.value},
                       {"incumbent", t.incumbent},
                       {"theta", std::vector<double>(
                                     t.theta.data(),
                                     t.theta.data() + t.theta.size())}});
    run["trace"] = trace;
  }
  {
    const auto& h = res.surrogate.hyper;
    run["surrogate"] = {
        {"signal_var", h.signal_var},
        {"noise_var", h.noise_var},
        {"length_scales",
         std::vector<double>(h.length_scales.data(),
                             h.length_scales.data() + h.length_scales.size())}};
  }
  if (g.format == "csv") {
    std::string body = csv_header(config) + "index,value,incumbent\n";
    for (const auto& t : res.trace)
      body += std::to_string(t.index) + "," + fmt(t.value) + "," +
              fmt(t.incumbent) + "\n";
    write_output(g, body);
  } else {
    write_output(g, run.dump(2) + "\n");
  }
  std::vector<std::string> outputs;
  if (!g.out.empty()) outputs.push_back(g.out);

  if (!heatmap_path.empty()) {
    std::string csv = csv_header(config);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j)
        csv += (j ? "," : "") + fmt(best_p.at(i, j));
      csv += "\n";
    }
    std::ofstream f(heatmap_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + heatmap_path);
    f << csv;
    outputs.push_back(heatmap_path);
  }
  print_metadata("optimize-2d", config, watch.seconds(), outputs);
  return 0;
}

int cmd_tail_compare(const GlobalOpts& g, const std::string& p_path,
                     double t_min, double t_max, int t_steps, int reps,
                     std::uint64_t seed) {
  Stopwatch watch;
  if (!(t_min > 0.0) || t_max <= t_min || t_steps < 1)
    throw std::invalid_argument("need 0 < t-min < t-max and t-steps >= 1");
  const auto m = wq::measures::load_measure1d(p_path);
  const auto* fm = std::get_if<wq::measures::FiniteMeasure1D>(&m);
  if (!fm) throw std::invalid_argument("tail-compare needs a finite1d measure");

  const auto cov = wq::bridge::build_covariance(fm->p());
  auto sample = wq::bridge::sample_statistic(cov, reps, seed, g.threads);
  std::sort(sample.values.begin(), sample.values.end());

  json config = {{"subcommand", "tail-compare"}, {"p", p_path},
                 {"t_min", t_min},               {"t_max", t_max},
                 {"t_steps", t_steps},           {"reps", reps},
                 {"seed", seed}};
  if (g.format == "json") {
    json rows = json::array();
    for (int i = 0; i <= t_steps; ++i) {
      const double t = t_min + (t_max - t_min) * static_cast<double>(i) / t_steps;
      const auto count = sample.values.end() -
                         std::upper_bound(sample.values.begin(),
                                          sample.values.end(), t);
      const auto ci = wq::stats::wilson_interval(count, reps, 0.99);
      rows.push_back({{"t", t},
                      {"mc_tail", static_cast<double>(count) / reps},
                      {"ci_lo", 1.0 - ci.hi},
                      {"ci_hi", 1.0 - ci.lo},
                      {"l1_bound", wq::bridge::l1_tail_bound(cov, t)}});
    }
    write_output(g, json{{"config", config},
                         {"note", "l1_bound is asymptotic, diagnostic only"},
                         {"rows", rows}}
                            .dump(2) +
                         "\n");
    print_metadata("tail-compare", config, watch.seconds(),
                   g.out.empty() ? std::vector<std::string>{}
                                 : std::vector<std::string>{g.out});
    return 0;
  }
  std::string body = csv_header(config);
  body += "# l1_bound is asymptotic, diagnostic only\n";
  body += "t,mc_tail,ci_lo,ci_hi,l1_bound\n";
  for (int i = 0; i <= t_steps; ++i) {
    const double t = t_min + (t_max - t_min) * static_cast<double>(i) / t_steps;
    const auto count = sample.values.end() -
                       std::upper_bound(sample.values.begin(),
                                        sample.values.end(), t);
    const auto ci = wq::stats::wilson_interval(count, reps, 0.99);
    body += fmt(t) + "," + fmt(static_cast<double>(count) / reps) + "," +
            fmt(1.0 - ci.hi) + "," + fmt(1.0 - ci.lo) + "," +
            fmt(wq::bridge::l1_tail_bound(cov, t)) + "\n";
  }
  write_output(g, body);
  print_metadata("tail-compare", config, watch.seconds(),
                 g.out.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{g.out});
  return 0;
}

int cmd_clt_check(const GlobalOpts& g, int n, int n_samples, int reps,
                  int bridge_reps, std::uint64_t seed) {
  Stopwatch watch;
  const wq::measures::Grid1D grid(n);
  const std::vector<double> p(static_cast<std::size_t>(n), 1.0 / n);
  const wq::measures::FiniteMeasure1D P(grid, p);
  const auto truth = wq::transport::make_cdf_curve(P);

  // law of sqrt(N) W1(empirical, P) over replicates
  std::vector<double> scaled(static_cast<std::size_t>(reps));
  wq::parallel_for(0, reps, g.threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      wq::RngStream rng(seed, static_cast<std::uint64_t>(r));
      const auto batch = wq::measures::sample(P, n_samples, rng);
      const auto emp = wq::measures::empirical_measure(batch, grid);
      scaled[static_cast<std::size_t>(r)] =
          std::sqrt(static_cast<double>(n_samples)) *
          wq::transport::w1_1d(wq::transport::make_cdf_curve(emp), truth);
    }
  });

  // limit law of the statistic, separate stream space
  const auto cov = wq::bridge::build_covariance(p);
  const auto limit =
      wq::bridge::sample_statistic(cov, bridge_reps, seed ^ 0x9E3779B97F4A7C15ull,
                                   g.threads);
  const double ks = wq::stats::two_sample_ks(scaled, limit.values);

  json config = {{"subcommand", "clt-check"}, {"n", n},
                 {"n_samples", n_samples},    {"reps", reps},
                 {"bridge_reps", bridge_reps}, {"seed", seed}};
  json result = {{"ks_distance", ks},
                 {"reps", reps},
                 {"bridge_reps", bridge_reps}};
  if (g.format == "csv") {
    std::string body = csv_header(config) + "ks_distance,reps,bridge_reps\n";
    body += fmt(ks) + "," + std::to_string(reps) + "," +
            std::to_string(bridge_reps) + "\n";
    write_output(g, body);
  } else {
    write_output(g, result.dump(2) + "\n");
  }
  print_metadata("clt-check", config, watch.seconds(),
                 g.out.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{g.out});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein-quantile laboratory"};
  app.set_version_flag("--version", wq::kVersion);
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--threads", g.threads,
                 "worker count (default: WQ_THREADS or hardware)")
      ->envname("WQ_THREADS");

  // w1
  std::string p_path, q_path, plan_path;
  auto* w1 = app.add_subcommand("w1", "Wasserstein distance between measures");
  w1->add_option("--p", p_path, "measure JSON")->required();
  w1->add_option("--q", q_path, "measure JSON")->required();
  w1->add_option("--plan", plan_path, "write the optimal plan (2-D only)");
  w1->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // bridge-cdf
  std::string bc_p;
  double bc_tmax = 1.5;
  int bc_tsteps = 200, bc_reps = 100000;
  std::uint64_t bc_seed = 1;
  auto* bc = app.add_subcommand("bridge-cdf",
                                "Monte Carlo CDF of the bridge statistic");
  bc->add_option("--p", bc_p, "finite1d measure JSON")->required();
  bc->add_option("--t-max", bc_tmax, "largest radius");
  bc->add_option("--t-steps", bc_tsteps, "number of grid points");
  bc->add_option("--reps", bc_reps, "Monte Carlo replicates");
  bc->add_option("--seed", bc_seed, "RNG seed");
  bc->add_option("--out", g.out, "output path (default stdout)");
  bc->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // lambda-curve
  int lc_n = 10, lc_reps = 100000, lc_steps = 101;
  std::string lc_alphas = "0.01:0.99:0.01";
  std::uint64_t lc_seed = 1;
  auto* lc = app.add_subcommand("lambda-curve",
                                "argmax lambda of the quantile per level");
  lc->add_option("--n", lc_n, "grid size");
  lc->add_option("--reps", lc_reps, "Monte Carlo replicates");
  lc->add_option("--alphas", lc_alphas, "levels start:end:step");
  lc->add_option("--lambda-steps", lc_steps, "lambda grid resolution");
  lc->add_option("--seed", lc_seed, "RNG seed");
  lc->add_option("--out", g.out, "output path (default stdout)");
  lc->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // confidence
  std::string cf_data, cf_candidate;
  double cf_alpha = 0.95;
  auto* cf = app.add_subcommand("confidence",
                                "confidence region from a sample CSV");
  cf->add_option("--data", cf_data, "sample CSV")->required();
  cf->add_option("--alpha", cf_alpha, "confidence level");
  cf->add_option("--candidate", cf_candidate, "candidate measure JSON");
  cf->add_option("--out", g.out, "output path (default stdout)");
  cf->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // coverage
  std::string cv_measure;
  int cv_n = 10000, cv_reps = 2000;
  double cv_alpha = 0.95;
  std::uint64_t cv_seed = 1;
  auto* cv = app.add_subcommand("coverage", "coverage simulation");
  cv->add_option("--measure", cv_measure, "measure JSON")->required();
  cv->add_option("--n-samples", cv_n, "sample size per replicate");
  cv->add_option("--alpha", cv_alpha, "confidence level");
  cv->add_option("--reps", cv_reps, "replicates");
  cv->add_option("--seed", cv_seed, "RNG seed");
  cv->add_option("--out", g.out, "output path (default stdout)");
  cv->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // optimize-2d
  int o_nx = 3, o_ny = 3, o_n = 100, o_reps = 100, o_budget = 200;
  double o_alpha = 0.95;
  std::uint64_t o_seed = 1;
  std::string o_heatmap;
  auto* op = app.add_subcommand("optimize-2d",
                                "Bayesian optimization of the 2-D quantile");
  op->add_option("--nx", o_nx, "grid size in x");
  op->add_option("--ny", o_ny, "grid size in y");
  op->add_option("--alpha", o_alpha, "quantile level");
  op->add_option("--n-samples", o_n, "empirical sample size N");
  op->add_option("--reps", o_reps, "distance replicates M per evaluation");
  op->add_option("--budget", o_budget, "objective evaluations");
  op->add_option("--seed", o_seed, "RNG seed");
  op->add_option("--out", g.out, "run JSON path (default stdout)");
  op->add_option("--emit-heatmap", o_heatmap, "write the incumbent matrix CSV");
  op->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // tail-compare
  std::string tc_p;
  double tc_tmin = 0.5, tc_tmax = 2.0;
  int tc_tsteps = 30, tc_reps = 1000000;
  std::uint64_t tc_seed = 1;
  auto* tc = app.add_subcommand(
      "tail-compare", "Monte Carlo tail against the analytic bound");
  tc->add_option("--p", tc_p, "finite1d measure JSON")->required();
  tc->add_option("--t-min", tc_tmin, "smallest threshold");
  tc->add_option("--t-max", tc_tmax, "largest threshold");
  tc->add_option("--t-steps", tc_tsteps, "grid points");
  tc->add_option("--reps", tc_reps, "Monte Carlo replicates");
  tc->add_option("--seed", tc_seed, "RNG seed");
  tc->add_option("--out", g.out, "output path (default stdout)");
  tc->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // clt-check
  int cl_n = 10, cl_nsamples = 10000, cl_reps = 10000, cl_breps = 10000;
  std::uint64_t cl_seed = 1;
  auto* cl = app.add_subcommand(
      "clt-check", "Kolmogorov distance between the scaled distance law and "
                   "the bridge limit");
  cl->add_option("--n", cl_n, "grid size");
  cl->add_option("--n-samples", cl_nsamples, "sample size per replicate");
  cl->add_option("--reps", cl_reps, "distance replicates");
  cl->add_option("--bridge-reps", cl_breps, "limit-law replicates");
  cl->add_option("--seed", cl_seed, "RNG seed");
  cl->add_option("--out", g.out, "output path (default stdout)");
  cl->add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (w1->parsed()) return cmd_w1(g, p_path, q_path, plan_path);
    if (bc->parsed())
      return cmd_bridge_cdf(g, bc_p, bc_tmax, bc_tsteps, bc_reps, bc_seed);
    if (lc->parsed())
      return cmd_lambda_curve(g, lc_n, lc_reps, lc_alphas, lc_steps, lc_seed);
    if (cf->parsed()) return cmd_confidence(g, cf_data, cf_alpha, cf_candidate);
    if (cv->parsed())
      return cmd_coverage(g, cv_measure, cv_n, cv_alpha, cv_reps, cv_seed);
    if (op->parsed())
      return cmd_optimize_2d(g, o_nx, o_ny, o_alpha, o_n, o_reps, o_budget,
                             o_seed, o_heatmap);
    if (tc->parsed())
      return cmd_tail_compare(g, tc_p, tc_tmin, tc_tmax, tc_tsteps, tc_reps,
                              tc_seed);
    if (cl->parsed())
      return cmd_clt_check(g, cl_n, cl_nsamples, cl_reps, cl_breps, cl_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
