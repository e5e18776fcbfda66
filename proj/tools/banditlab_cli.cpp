// banditlab command-line front end: estimate, sweep, oracle, verify.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "banditlab/acceptance.hpp"
#include "banditlab/info_metrics.hpp"
#include "banditlab/sweep.hpp"

using namespace banditlab;

namespace {

struct AlgorithmArgs {
  std::string kind = "sprt";
  int repetitions = 1;
  std::string inner = "sprt";
  bool derandomize = false;
};

void add_algorithm_options(CLI::App* cmd, AlgorithmArgs& a) {
  cmd->add_option("--alg", a.kind, "sprt, msprt, boost, ni, twophase, stopped or guess")->required();
  cmd->add_option("--m", a.repetitions, "boost: number of inner runs")->check(CLI::PositiveNumber);
  cmd->add_option("--inner", a.inner, "boost: inner learner");
}

AlgorithmConfig to_config(const AlgorithmArgs& a, std::int64_t budget) {
  AlgorithmConfig cfg;
  cfg.kind = parse_algorithm_kind(a.kind);
  cfg.budget = budget;
  cfg.derandomize = a.derandomize;
  if (cfg.kind == AlgorithmKind::boosting) cfg.boosting = BoostingParams{a.repetitions, parse_algorithm_kind(a.inner)};
  cfg.validate();
  return cfg;
}

void write_rows(const std::string& path, const std::vector<SweepRow>& rows) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

int report_failed_cells(const std::vector<SweepRow>& rows) {
  int failed = 0;
  for (const SweepRow& r : rows) {
    if (r.ok()) continue;
    ++failed;
    std::cerr << "cell n=" << r.n << " delta=" << r.delta << " t=" << r.t << " failed: " << r.error << '\n';
  }
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-arm identification simulation lab"};
  app.require_subcommand(1);

  // estimate
  AlgorithmArgs est_alg;
  int est_n = 0;
  double est_delta = 0.0;
  std::int64_t est_t = 0;
  std::int64_t est_trials = 0;
  std::uint64_t est_seed = 0;
  std::vector<std::string> est_metrics{"success", "mi"};
  std::string est_out;
  int est_jobs = 1;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate for one (alg, n, delta, t) cell");
  add_algorithm_options(estimate, est_alg);
  estimate->add_option("--n", est_n, "number of arms")->required();
  estimate->add_option("--delta", est_delta, "reward gap")->required();
  estimate->add_option("--t", est_t, "pull budget")->required();
  estimate->add_option("--trials", est_trials, "Monte Carlo trials")->required();
  estimate->add_option("--seed", est_seed, "master seed")->required();
  estimate->add_option("--metric", est_metrics, "success, mi or both")
      ->delimiter(',')
      ->check(CLI::IsMember({"success", "mi"}));
  estimate->add_flag("--derandomize", est_alg.derandomize, "scan arms in index order");
  estimate->add_option("--out", est_out, "CSV output path (default stdout)");
  estimate->add_option("--jobs", est_jobs, "worker threads (1 = sequential)");

  // sweep
  std::string sweep_config;
  std::optional<int> sweep_jobs;
  auto* sweep = app.add_subcommand("sweep", "Run a grid described by a JSON config");
  sweep->add_option("--config", sweep_config, "JSON config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--jobs", sweep_jobs, "worker threads, overrides the config");

  // oracle
  AlgorithmArgs or_alg;
  int or_n = 0;
  double or_delta = 0.0;
  std::int64_t or_t = 0;
  auto* oracle = app.add_subcommand("oracle", "Exact success probability and information on a small instance");
  add_algorithm_options(oracle, or_alg);
  oracle->add_option("--n", or_n, "number of arms (at most 8)")->required();
  oracle->add_option("--delta", or_delta, "reward gap")->required();
  oracle->add_option("--t", or_t, "pull budget (at most 20)")->required();

  // verify
  std::string suite;
  std::uint64_t verify_seed = AcceptanceOptions{}.seed;
  int verify_jobs = 1;
  bool verbose = false;
  auto* verify = app.add_subcommand("verify", "Run an acceptance suite; exit code 0 when every criterion passes");
  std::vector<std::string> suite_names;
  for (auto s : acceptance_suites()) suite_names.emplace_back(s);
  verify->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names));
  verify->add_option("--seed", verify_seed, "master seed");
  verify->add_option("--jobs", verify_jobs, "worker threads");
  verify->add_flag("--verbose", verbose, "print sweep progress");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) {
      SweepConfig cfg;
      cfg.algorithm = to_config(est_alg, est_t);
      cfg.arms = {est_n};
      cfg.deltas = {est_delta};
      cfg.budgets.explicit_values = {est_t};
      cfg.trials.base = est_trials;
      cfg.seed = est_seed;
      cfg.jobs = est_jobs;
      cfg.success = std::find(est_metrics.begin(), est_metrics.end(), "success") != est_metrics.end();
      cfg.mutual_info = std::find(est_metrics.begin(), est_metrics.end(), "mi") != est_metrics.end();
      const auto rows = run_sweep(cfg);
      if (report_failed_cells(rows) > 0) return 1;
      write_rows(est_out, rows);
      return 0;
    }

    if (*sweep) {
      std::ifstream in(sweep_config);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(sweep_config + ": " + e.what());
      }
      SweepConfig cfg = sweep_config_from_json(doc);
      if (sweep_jobs) cfg.jobs = *sweep_jobs;
      const auto rows = run_sweep(cfg, [](const SweepRow& row, std::size_t done, std::size_t total) {
        std::cerr << '[' << done << '/' << total << "] n=" << row.n << " delta=" << row.delta << " t=" << row.t
                  << (row.ok() ? "" : " FAILED") << '\n';
      });
      write_rows(cfg.output, rows);
      return report_failed_cells(rows) > 0 ? 3 : 0;
    }

    if (*oracle) {
      or_alg.derandomize = true;
      const ExactResult r = exact_small_instance(to_config(or_alg, or_t), or_n, or_delta);
      std::printf("p_exact=%.17g\ni_exact=%.17g\nhistories=%lld\n", r.success, r.mutual_info,
                  static_cast<long long>(r.histories));
      return 0;
    }

    if (*verify) {
      AcceptanceOptions opts;
      opts.seed = verify_seed;
      opts.jobs = verify_jobs;
      opts.on_result = [](const CriterionResult& r) {
        std::printf("%s [%d] %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                    r.seconds);
        std::fflush(stdout);
      };
      if (verbose) opts.on_progress = [](const std::string& line) { std::cerr << line << '\n'; };
      const auto results = run_acceptance(suite, opts);
      const bool ok = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
