#include "banditlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>

#include "banditlab/algorithms.hpp"
#include "banditlab/info_metrics.hpp"
#include "banditlab/sweep.hpp"
#include "banditlab/walks.hpp"

namespace banditlab {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

AlgorithmConfig config(AlgorithmKind kind, std::int64_t budget, bool derandomize = false) {
  AlgorithmConfig cfg;
  cfg.kind = kind;
  cfg.budget = budget;
  cfg.derandomize = derandomize;
  return cfg;
}

CellEstimate estimate(const AlgorithmConfig& cfg, int n, double delta, std::int64_t trials, std::uint64_t seed,
                      int jobs, bool mi) {
  EstimateRequest req;
  req.algorithm = cfg;
  req.arms = n;
  req.delta = delta;
  req.trials = trials;
  req.seed = seed;
  req.mutual_info = mi;
  req.jobs = jobs;
  return estimate_cell(req);
}

// ---------------------------------------------------------------------------

CriterionResult noiseless_closed_form(const AcceptanceOptions&) {
  CriterionResult r{1, "noiseless SPRT closed form", true, "", 0.0};
  int cells = 0;
  for (int n : {4, 16, 64}) {
    for (std::int64_t t = 0; t <= n; ++t) {
      const AlgorithmConfig cfg = config(AlgorithmKind::sprt, t, true);
      std::int64_t hits = 0;
      for (int best = 1; best <= n; ++best) {
        const BanditInstance inst(n, 1.0, best);
        RngStream rng(0, static_cast<std::uint64_t>(best));
        hits += run_learner(cfg, inst, rng).chosen_arm == best ? 1 : 0;
      }
      ++cells;
      const std::int64_t expected = std::min<std::int64_t>(t + 1, n);
      if (hits != expected && r.passed) {
        r.passed = false;
        r.detail = fmt("n=%d t=%lld: %lld/%d successes, expected %lld/%d", n, static_cast<long long>(t),
                       static_cast<long long>(hits), n, static_cast<long long>(expected), n);
      }
    }
  }
  if (r.passed) r.detail = fmt("%d (n, t) cells match min(t+1, n)/n exactly", cells);
  return r;
}

CriterionResult small_oracle(const AcceptanceOptions& opt) {
  CriterionResult r{2, "small-instance oracle equivalence", true, "", 0.0};
  constexpr std::int64_t kTrials = 200000;
  int comparisons = 0;
  int failures = 0;
  double worst = 0.0;
  std::string worst_cell;
  std::uint64_t cell_seed = opt.seed;
  for (AlgorithmKind kind : {AlgorithmKind::sprt, AlgorithmKind::modified_sprt, AlgorithmKind::non_interactive}) {
    for (int n : {2, 3}) {
      for (double delta : {0.25, 0.5}) {
        for (std::int64_t t = 1; t <= 8; ++t) {
          const AlgorithmConfig cfg = config(kind, t, true);
          const ExactResult exact = exact_small_instance(cfg, n, delta);
          const CellEstimate mc = estimate(cfg, n, delta, kTrials, cell_seed++, opt.jobs, true);
          const std::pair<const char*, std::pair<double, EstimateWithCI>> checks[] = {
              {"p", {exact.success, *mc.success}}, {"I", {exact.mutual_info, *mc.mutual_info}}};
          for (const auto& [label, pair] : checks) {
            const auto& [truth, est] = pair;
            ++comparisons;
            const double z = std::abs(est.mean - truth) / std::max(est.std_error, 1e-300);
            const bool ok = std::abs(est.mean - truth) <= 3.0 * est.std_error + 1e-12;
            if (!ok) ++failures;
            if (z > worst && std::abs(est.mean - truth) > 1e-12) {
              worst = z;
              worst_cell = fmt("%s %s n=%d delta=%g t=%lld: %.6g vs exact %.6g (se %.2g)", std::string(cli_name(kind)).c_str(),
                               label, n, delta, static_cast<long long>(t), est.mean, truth, est.std_error);
            }
          }
        }
      }
    }
  }
  r.passed = failures == 0;
  // Under exact agreement about 0.27% of comparisons land outside 3 se by chance.
  r.detail = fmt("%d comparisons, %d outside 3 se (%.2f expected by chance); largest deviation %.2f se at %s",
                 comparisons, failures, comparisons * 0.0027, worst, worst_cell.c_str());
  return r;
}

CriterionResult walk_hitting_check(const AcceptanceOptions&) {
  CriterionResult r{3, "walk hitting probability and time", true, "", 0.0};
  double worst_p = 0.0;
  double worst_t = 0.0;
  for (double theta : {-1.0, -2.0, -3.0, -6.0}) {
    for (double delta : {0.1, 0.25, 0.5}) {
      const double bound_p = std::pow((1.0 - delta) / (1.0 + delta), -theta);
      const double p = hitting_prob_oracle(theta, delta, 100000);
      const double bound_t = -theta / delta;
      const double e = expected_hitting_time_oracle(theta, delta, 100000);
      worst_p = std::max(worst_p, std::abs(p - bound_p));
      worst_t = std::max(worst_t, std::abs(e - bound_t) / bound_t);
      const bool ok = p <= bound_p + 1e-12 && std::abs(p - bound_p) <= 1e-3 && e <= bound_t * (1.0 + 1e-12) &&
                      e >= 0.99 * bound_t;
      if (!ok && r.passed) {
        r.passed = false;
        r.detail = fmt("theta=%g delta=%g: P=%.12g (bound %.12g), E=%.12g (bound %.12g)", theta, delta, p, bound_p,
                       e, bound_t);
      }
    }
  }
  if (r.passed) {
    r.detail = fmt("12 grid points; max |P - bound| = %.3g, max relative E[T] gap = %.3g", worst_p, worst_t);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Shared SPRT sweep for the phase, success-scaling and Fano criteria.

constexpr int kPhaseArms = 1024;
constexpr double kPhaseDelta = 0.15;
constexpr int kPointsPerWindow = 14;

struct Window {
  const char* name;
  double lo;  // in units of t delta^2
  double hi;
};

std::vector<Window> phase_windows() {
  const double log_n = std::log(static_cast<double>(kPhaseArms));
  return {{"first-linear", 0.1, 1.0}, {"quadratic", 2.0, log_n}, {"second-linear", 4.0 * log_n, kPhaseArms / 4.0}};
}

// Log-spaced integer budgets whose t delta^2 lies inside [lo, hi].
std::vector<std::int64_t> window_budgets(const Window& w, int points) {
  const double d2 = kPhaseDelta * kPhaseDelta;
  const auto t_lo = ceil_count(w.lo / d2);
  const auto t_hi = floor_count(w.hi / d2);
  std::vector<std::int64_t> out;
  for (int k = 0; k < points; ++k) {
    const double frac = static_cast<double>(k) / (points - 1);
    const double t = std::exp(std::log(static_cast<double>(t_lo)) +
                              frac * (std::log(static_cast<double>(t_hi)) - std::log(static_cast<double>(t_lo))));
    out.push_back(std::clamp<std::int64_t>(std::llround(t), t_lo, t_hi));
  }
  return out;
}

struct PhaseSweep {
  std::vector<SweepRow> rows;
  double seconds = 0.0;
};

SweepConfig phase_sweep_config(std::uint64_t seed, int jobs) {
  SweepConfig cfg;
  cfg.algorithm = config(AlgorithmKind::sprt, 0);
  cfg.arms = {kPhaseArms};
  cfg.deltas = {kPhaseDelta};
  for (const Window& w : phase_windows()) {
    for (std::int64_t t : window_budgets(w, kPointsPerWindow)) cfg.budgets.explicit_values.push_back(t);
  }
  // Extra budgets so the success slope covers t delta^2 up to n / 2.
  // The first point would duplicate the end of the second-linear window.
  const auto extra = window_budgets({"success", kPhaseArms / 4.0, kPhaseArms / 2.0}, 5);
  cfg.budgets.explicit_values.insert(cfg.budgets.explicit_values.end(), extra.begin() + 1, extra.end());
  cfg.trials.base = 50000;
  cfg.trials.auto_scale = true;
  cfg.trials.cap = 1000000;
  cfg.seed = seed;
  cfg.jobs = jobs;
  return cfg;
}

std::vector<std::pair<double, double>> series(const std::vector<SweepRow>& rows, double SweepRow::*field) {
  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& row : rows) pts.emplace_back(static_cast<double>(row.t), row.*field);
  return pts;
}

int points_in(const std::vector<SweepRow>& rows, double lo, double hi) {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const SweepRow& row) {
    return row.t_delta_sq >= lo - 1e-9 && row.t_delta_sq <= hi + 1e-9;
  }));
}

CriterionResult phase_slopes(const PhaseSweep& sweep) {
  CriterionResult r{4, "mutual-information phase slopes", true, "", 0.0};
  const double d2 = kPhaseDelta * kPhaseDelta;
  const auto pts = series(sweep.rows, &SweepRow::i_hat);
  const std::pair<double, double> gates[] = {{0.75, 1.25}, {1.6, 2.4}, {0.75, 1.25}};
  const auto windows = phase_windows();
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const Window& w = windows[k];
    const int count = points_in(sweep.rows, w.lo, w.hi);
    double slope = std::nan("");
    try {
      slope = fit_loglog_slope(pts, w.lo / d2 * (1.0 - 1e-9), w.hi / d2 * (1.0 + 1e-9));
    } catch (const std::exception&) {
    }
    const bool ok = count >= 12 && slope >= gates[k].first && slope <= gates[k].second;
    r.passed = r.passed && ok;
    r.detail += fmt("%s%s slope %.3f in [%.2f, %.2f] over %d t values", k ? "; " : "", w.name, slope,
                    gates[k].first, gates[k].second, count);
  }
  return r;
}

CriterionResult success_scaling(const PhaseSweep& sweep) {
  CriterionResult r{5, "success probability scaling", true, "", 0.0};
  const double d2 = kPhaseDelta * kPhaseDelta;
  const double lo = 4.0;
  const double hi = kPhaseArms / 2.0;
  double slope = std::nan("");
  try {
    slope = fit_loglog_slope(series(sweep.rows, &SweepRow::p_hat), lo / d2 * (1.0 - 1e-9), hi / d2 * (1.0 + 1e-9));
  } catch (const std::exception&) {
  }
  const bool slope_ok = slope >= 0.85 && slope <= 1.15;
  int below = 0;
  std::string first_bad;
  for (const SweepRow& row : sweep.rows) {
    const double floor_p = 0.07 * (1.0 + row.t_delta_sq) / kPhaseArms - 3.0 * row.p_se;
    if (!(row.p_hat >= floor_p)) {
      if (below++ == 0) first_bad = fmt(" (first at t=%lld: %.4g < %.4g)", static_cast<long long>(row.t), row.p_hat, floor_p);
    }
  }
  r.passed = slope_ok && below == 0;
  r.detail = fmt("slope %.3f in [0.85, 1.15] over %d t values; %d of %zu rows below the linear floor%s", slope,
                 points_in(sweep.rows, lo, hi), below, sweep.rows.size(), first_bad.c_str());
  return r;
}

CriterionResult fano_consistency(const PhaseSweep& sweep) {
  CriterionResult r{6, "Fano consistency", true, "", 0.0};
  int violations = 0;
  double tightest = INFINITY;
  std::string first_bad;
  for (const SweepRow& row : sweep.rows) {
    double gap = 0.0;
    double slack = 0.0;
    if (row.p_hat > 0.0) {
      gap = fano_gap(row.p_hat, row.i_hat, row.n);
      slack = 3.0 * row.p_se * std::log(row.n * row.p_hat / std::exp(1.0)) + 3.0 * row.i_se;
    } else {
      // p ln(np/e) vanishes as p -> 0.
      gap = row.i_hat;
      slack = 3.0 * row.i_se;
    }
    tightest = std::min(tightest, gap + slack);
    if (!(gap >= -slack)) {
      if (violations++ == 0) first_bad = fmt(" (first at t=%lld: gap %.4g, slack %.4g)", static_cast<long long>(row.t), gap, slack);
    }
  }
  r.passed = violations == 0 && !sweep.rows.empty();
  r.detail = fmt("%d of %zu rows violate the bound; smallest margin %.4g%s", violations, sweep.rows.size(), tightest,
                 first_bad.c_str());
  return r;
}

// ---------------------------------------------------------------------------

double combined_se(double a, double wa, double b, double wb) {
  return std::sqrt(wa * wa * a * a + wb * wb * b * b);
}

CriterionResult information_separation(const AcceptanceOptions& opt) {
  CriterionResult r{7, "learning vs information separation", true, "", 0.0};
  constexpr int n = 16384;
  constexpr double delta = 0.1;
  const std::int64_t t = std::llround(20.0 / (delta * delta));
  constexpr std::int64_t trials = 100000;
  const CellEstimate s = estimate(config(AlgorithmKind::sprt, t), n, delta, trials, opt.seed + 101, opt.jobs, true);
  const CellEstimate m =
      estimate(config(AlgorithmKind::modified_sprt, t), n, delta, trials, opt.seed + 102, opt.jobs, true);
  const auto& is = *s.mutual_info;
  const auto& im = *m.mutual_info;
  const auto& ps = *s.success;
  const auto& pm = *m.success;
  // Ratio gates as linear combinations of independent estimates.
  const bool info_ok = im.mean - 0.7 * is.mean <= 3.0 * combined_se(im.std_error, 1.0, is.std_error, 0.7);
  const bool succ_ok = pm.mean - 0.3 * ps.mean >= -3.0 * combined_se(pm.std_error, 1.0, ps.std_error, 0.3);
  r.passed = info_ok && succ_ok;
  r.detail = fmt("t=%lld: I msprt/sprt = %.4g/%.4g = %.3f (gate 0.7); p msprt/sprt = %.4g/%.4g = %.3f (gate 0.3)",
                 static_cast<long long>(t), im.mean, is.mean, im.mean / is.mean, pm.mean, ps.mean, pm.mean / ps.mean);
  return r;
}

CriterionResult interactive_advantage(const AcceptanceOptions& opt) {
  CriterionResult r{8, "interactive vs non-interactive", true, "", 0.0};
  constexpr int n = 1024;
  constexpr double delta = 0.15;
  const std::int64_t t = floor_count(n / (2.0 * delta * delta));
  constexpr std::int64_t trials = 40000;
  const auto s = *estimate(config(AlgorithmKind::sprt, t), n, delta, trials, opt.seed + 201, opt.jobs, false).success;
  const auto ni =
      *estimate(config(AlgorithmKind::non_interactive, t), n, delta, trials, opt.seed + 202, opt.jobs, false).success;
  r.passed = s.mean - 3.0 * ni.mean >= -3.0 * combined_se(s.std_error, 1.0, ni.std_error, 3.0);
  r.detail = fmt("t=%lld: p sprt = %.4g (se %.2g), p ni = %.4g (se %.2g), ratio %.3f (gate 3)",
                 static_cast<long long>(t), s.mean, s.std_error, ni.mean, ni.std_error, s.mean / ni.mean);
  return r;
}

CriterionResult two_phase_advantage(const AcceptanceOptions& opt) {
  CriterionResult r{9, "two-phase advantage grows with n", true, "", 0.0};
  constexpr double delta = 0.05;
  const std::int64_t t = std::llround(4.0 / (delta * delta));
  constexpr std::int64_t trials = 20000;
  const AlgorithmConfig cfg = config(AlgorithmKind::two_phase, t);
  const double m = static_cast<double>(t) * delta * delta;
  const int small_n = 1 << 10;
  const int large_n = 1 << 14;
  const auto small = *estimate(cfg, small_n, delta, trials, opt.seed + 301, opt.jobs, false).success;
  const auto large = *estimate(cfg, large_n, delta, trials, opt.seed + 302, opt.jobs, false).success;
  const double ws = small_n / m;
  const double wl = large_n / m;
  r.passed = wl * large.mean - ws * small.mean > 3.0 * combined_se(large.std_error, wl, small.std_error, ws);
  r.detail = fmt("t=%lld: p n/(t delta^2) = %.4g at n=2^14 vs %.4g at n=2^10 (se %.2g, %.2g)",
                 static_cast<long long>(t), wl * large.mean, ws * small.mean, wl * large.std_error,
                 ws * small.std_error);
  return r;
}

CriterionResult stopping_wrapper(const AcceptanceOptions& opt) {
  CriterionResult r{10, "stopping-time wrapper", true, "", 0.0};
  constexpr int n = 1024;
  constexpr double delta = 0.15;
  const std::int64_t t = floor_count(n / (4.0 * delta * delta));
  constexpr std::int64_t trials = 40000;
  const CellEstimate est = estimate(config(AlgorithmKind::stopped, t), n, delta, trials, opt.seed + 401, opt.jobs, false);
  const double target = 0.05 * static_cast<double>(t) * delta * delta / n;
  const bool pulls_ok = est.pulls.mean <= static_cast<double>(t) + 3.0 * est.pulls.std_error;
  const bool succ_ok = est.success->mean >= target;
  r.passed = pulls_ok && succ_ok;
  r.detail = fmt("t=%lld: mean pulls %.1f (se %.1f); p = %.4g vs floor %.4g", static_cast<long long>(t),
                 est.pulls.mean, est.pulls.std_error, est.success->mean, target);
  return r;
}

CriterionResult toolkit(const AcceptanceOptions&) {
  CriterionResult r{11, "divergence toolkit", true, "", 0.0};
  const double tv = tv_binomial(1, 0.25, 0.75);
  const double kl = kl_bernoulli(0.25, 0.75);
  const bool tv_ok = tv == 0.5;
  const bool kl_ok = std::abs(kl - 0.5 * std::log(3.0)) <= 1e-12;
  int grid = 0;
  int bad = 0;
  double worst_ratio = INFINITY;
  for (double delta : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}) {
    const std::int64_t k_max = floor_count(1.0 / (delta * delta));
    for (std::int64_t k = 1; k <= k_max; ++k) {
      const double v = tv_binomial(k, (1.0 - delta) / 2.0, (1.0 + delta) / 2.0);
      const double gate = 0.3 * std::sqrt(static_cast<double>(k) * delta * delta);
      worst_ratio = std::min(worst_ratio, v / gate);
      ++grid;
      if (!(v >= gate)) ++bad;
    }
  }
  r.passed = tv_ok && kl_ok && bad == 0;
  r.detail = fmt("tv(1, 1/4, 3/4) = %.17g; kl error %.2g; binomial TV gate: %d/%d grid points pass, min ratio %.3f",
                 tv, std::abs(kl - 0.5 * std::log(3.0)), grid - bad, grid, worst_ratio);
  return r;
}

const std::map<std::string_view, std::vector<int>, std::less<>>& suites() {
  static const std::map<std::string_view, std::vector<int>, std::less<>> table = {
      {"delta1", {1}},
      {"oracle", {2}},
      {"lemma1", {3}},
      {"phases", {4, 5, 6}},
      {"fano", {6}},
      {"separation", {7, 8, 9, 10}},
      {"toolkit", {11}},
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}},
  };
  return table;
}

// Runtime limits that are part of a criterion.
std::optional<double> time_limit(int id) {
  switch (id) {
    case 1: return 1.0;
    case 2: return 60.0;
    case 3: return 30.0;
    default: return std::nullopt;
  }
}

}  // namespace

std::vector<std::string_view> acceptance_suites() {
  return {"delta1", "oracle", "lemma1", "phases", "fano", "separation", "toolkit", "all"};
}

std::vector<int> suite_criteria(std::string_view suite) {
  auto it = suites().find(suite);
  if (it == suites().end()) throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
  return it->second;
}

std::vector<CriterionResult> run_acceptance(std::string_view suite, const AcceptanceOptions& options) {
  using clock = std::chrono::steady_clock;
  const std::vector<int> ids = suite_criteria(suite);
  std::optional<PhaseSweep> sweep;
  auto ensure_sweep = [&] {
    if (sweep) return;
    const auto start = clock::now();
    const SweepConfig cfg = phase_sweep_config(options.seed, options.jobs);
    SweepProgress progress;
    if (options.on_progress) {
      progress = [&](const SweepRow& row, std::size_t done, std::size_t total) {
        options.on_progress(fmt("  sweep %zu/%zu: t=%lld trials=%lld p=%.4g I=%.4g", done, total,
                                static_cast<long long>(row.t), static_cast<long long>(row.trials), row.p_hat,
                                row.i_hat));
      };
    }
    sweep = PhaseSweep{run_sweep(cfg, progress), 0.0};
    sweep->seconds = std::chrono::duration<double>(clock::now() - start).count();
  };

  std::vector<CriterionResult> results;
  for (int id : ids) {
    const auto start = clock::now();
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = noiseless_closed_form(options); break;
        case 2: r = small_oracle(options); break;
        case 3: r = walk_hitting_check(options); break;
        case 4: ensure_sweep(); r = phase_slopes(*sweep); break;
        case 5: ensure_sweep(); r = success_scaling(*sweep); break;
        case 6: ensure_sweep(); r = fano_consistency(*sweep); break;
        case 7: r = information_separation(options); break;
        case 8: r = interactive_advantage(options); break;
        case 9: r = two_phase_advantage(options); break;
        case 10: r = stopping_wrapper(options); break;
        case 11: r = toolkit(options); break;
        default: throw std::logic_error("no such criterion");
      }
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    // The sweep's cost is charged to the first criterion that needed it.
    r.seconds += std::chrono::duration<double>(clock::now() - start).count();
    if (auto limit = time_limit(id); limit && r.seconds > *limit) {
      r.passed = false;
      r.detail += fmt("; took %.2f s, limit %.0f s", r.seconds, *limit);
    }
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace banditlab
