#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "banditlab/info_metrics.hpp"
#include "banditlab/sweep.hpp"
#include "banditlab/walks.hpp"

namespace py = pybind11;
using namespace banditlab;

namespace {

AlgorithmConfig make_config(const std::string& alg, std::int64_t t, bool derandomize, int m, const std::string& inner) {
  AlgorithmConfig cfg;
  cfg.kind = parse_algorithm_kind(alg);
  cfg.budget = t;
  cfg.derandomize = derandomize;
  if (cfg.kind == AlgorithmKind::boosting) cfg.boosting = BoostingParams{m, parse_algorithm_kind(inner)};
  cfg.validate();
  return cfg;
}

py::object maybe(double x) { return std::isnan(x) ? py::object(py::none()) : py::object(py::float_(x)); }

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["alg"] = r.alg;
  d["model"] = r.model;
  d["n"] = r.n;
  d["delta"] = r.delta;
  d["t"] = r.t;
  d["trials"] = r.trials;
  d["seed"] = r.seed;
  d["p_hat"] = maybe(r.p_hat);
  d["p_se"] = maybe(r.p_se);
  d["i_hat"] = maybe(r.i_hat);
  d["i_se"] = maybe(r.i_se);
  d["mean_pulls"] = maybe(r.mean_pulls);
  d["t_delta_sq"] = r.t_delta_sq;
  d["error"] = r.error.empty() ? py::object(py::none()) : py::object(py::str(r.error));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Best-arm identification simulation lab";

  py::register_exception<OracleUnsupported>(m, "OracleUnsupported", PyExc_ValueError);

  m.def(
      "estimate",
      [](const std::string& alg, int n, double delta, std::int64_t t, std::int64_t trials, std::uint64_t seed,
         bool success, bool mi, bool derandomize, int m_reps, const std::string& inner, int jobs) {
        SweepConfig cfg;
        cfg.algorithm = make_config(alg, t, derandomize, m_reps, inner);
        cfg.arms = {n};
        cfg.deltas = {delta};
        cfg.budgets.explicit_values = {t};
        cfg.trials.base = trials;
        cfg.seed = seed;
        cfg.success = success;
        cfg.mutual_info = mi;
        cfg.jobs = jobs;
        const auto rows = [&] {
          py::gil_scoped_release release;
          return run_sweep(cfg);
        }();
        if (!rows.at(0).ok()) throw std::invalid_argument(rows[0].error);
        return row_dict(rows[0]);
      },
      py::arg("alg"), py::arg("n"), py::arg("delta"), py::arg("t"), py::arg("trials"), py::arg("seed"),
      py::arg("success") = true, py::arg("mi") = true, py::arg("derandomize") = false, py::arg("m") = 1,
      py::arg("inner") = "sprt", py::arg("jobs") = 1,
      "Monte Carlo estimate for one cell; returns a dict with the CSV columns.");

  m.def(
      "oracle",
      [](const std::string& alg, int n, double delta, std::int64_t t, int m_reps, const std::string& inner) {
        const ExactResult r = exact_small_instance(make_config(alg, t, true, m_reps, inner), n, delta);
        return py::make_tuple(r.success, r.mutual_info);
      },
      py::arg("alg"), py::arg("n"), py::arg("delta"), py::arg("t"), py::arg("m") = 1, py::arg("inner") = "sprt",
      "Exact (success, information) for a derandomized learner on a small instance.");

  m.def(
      "run",
      [](const std::string& alg, int n, double delta, int best_arm, std::int64_t t, std::uint64_t seed,
         std::uint64_t index, bool derandomize) {
        AlgorithmConfig cfg = make_config(alg, t, derandomize, 1, "sprt");
        cfg.record_log = true;
        RngStream rng(seed, index);
        const RunOutcome out = run_learner(cfg, BanditInstance(n, delta, best_arm), rng);
        py::dict d;
        d["chosen_arm"] = out.chosen_arm;
        d["pulls_used"] = out.pulls_used;
        d["pulls"] = out.stats.pulls_vector();
        d["displacements"] = out.stats.displacement_vector();
        std::vector<std::pair<int, int>> log;
        for (const PullRecord& rec : *out.log) log.emplace_back(rec.arm, rec.reward ? 1 : 0);
        d["log"] = log;
        return d;
      },
      py::arg("alg"), py::arg("n"), py::arg("delta"), py::arg("best_arm"), py::arg("t"), py::arg("seed") = 0,
      py::arg("index") = 0, py::arg("derandomize") = false, "One learner run on a fixed instance, with its pull log.");

  m.def(
      "sweep",
      [](const std::string& config_json) {
        const SweepConfig cfg = sweep_config_from_json(nlohmann::json::parse(config_json));
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(cfg);
        }
        py::list out;
        for (const SweepRow& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("config_json"), "Run a sweep from a JSON config string; one dict per grid cell.");

  m.def(
      "sweep_csv",
      [](const std::string& config_json) {
        const SweepConfig cfg = sweep_config_from_json(nlohmann::json::parse(config_json));
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          write_csv(out, run_sweep(cfg));
        }
        return out.str();
      },
      py::arg("config_json"));

  m.def(
      "posterior",
      [](const std::vector<std::int64_t>& displacements, double delta) {
        SufficientStats st(static_cast<int>(displacements.size()));
        for (std::size_t i = 0; i < displacements.size(); ++i) {
          const std::int64_t c = displacements[i];
          if (c != 0) st.add_batch(static_cast<int>(i + 1), std::abs(c), c > 0 ? c : 0);
        }
        return posterior_from_stats(st, delta).weights;
      },
      py::arg("displacements"), py::arg("delta"));

  m.def("kl_to_uniform", [](const std::vector<double>& w) { return kl_to_uniform(Posterior{w}); }, py::arg("weights"));
  m.def("kl_bernoulli", &kl_bernoulli, py::arg("p"), py::arg("q"));
  m.def("tv_binomial", &tv_binomial, py::arg("k"), py::arg("p"), py::arg("q"));
  m.def("fano_gap", &fano_gap, py::arg("p"), py::arg("i"), py::arg("n"));
  m.def("hitting_prob_oracle", &hitting_prob_oracle, py::arg("theta"), py::arg("delta"), py::arg("horizon"));
  m.def("expected_hitting_time_oracle", &expected_hitting_time_oracle, py::arg("theta"), py::arg("delta"),
        py::arg("horizon"));
  m.def("choose_m_non_interactive", &choose_m_non_interactive, py::arg("t"), py::arg("delta"));
  m.def(
      "fit_loglog_slope",
      [](const std::vector<std::pair<double, double>>& pts, double lo, double hi) { return fit_loglog_slope(pts, lo, hi); },
      py::arg("points"), py::arg("lo"), py::arg("hi"));
  m.attr("CSV_HEADER") = std::string(kCsvHeader);
}
