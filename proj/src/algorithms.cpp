#include "banditlab/algorithms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "learners.hpp"

namespace banditlab {

namespace {

struct KindName {
  AlgorithmKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 7> kKindNames{{
    {AlgorithmKind::sprt, "sprt"},
    {AlgorithmKind::modified_sprt, "msprt"},
    {AlgorithmKind::boosting, "boost"},
    {AlgorithmKind::non_interactive, "ni"},
    {AlgorithmKind::two_phase, "twophase"},
    {AlgorithmKind::stopped, "stopped"},
    {AlgorithmKind::random_guess, "guess"},
}};

void check_budget(std::int64_t budget) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
}

/// Inverse-CDF sampler for Binomial(count, p) on 53-bit uniforms.
class BinomialTable {
 public:
  BinomialTable() = default;
  BinomialTable(std::int64_t count, double p) : count_(count) {
    thresholds_.resize(static_cast<std::size_t>(count + 1));
    if (p <= 0.0 || p >= 1.0) {
      // Degenerate law: all mass on 0 or on count.
      const std::int64_t atom = p >= 1.0 ? count : 0;
      for (std::int64_t j = 0; j <= count; ++j)
        thresholds_[static_cast<std::size_t>(j)] = j >= atom ? (std::uint64_t{1} << 53) : 0;
      return;
    }
    std::vector<double> log_pmf(thresholds_.size());
    const double lq = std::log1p(-p);
    const double lp = std::log(p);
    const double lgn = std::lgamma(static_cast<double>(count) + 1.0);
    double peak = -INFINITY;
    for (std::int64_t j = 0; j <= count; ++j) {
      const double x = lgn - std::lgamma(static_cast<double>(j) + 1.0) -
                       std::lgamma(static_cast<double>(count - j) + 1.0) + static_cast<double>(j) * lp +
                       static_cast<double>(count - j) * lq;
      log_pmf[static_cast<std::size_t>(j)] = x;
      peak = std::max(peak, x);
    }
    double total = 0.0;
    for (double& x : log_pmf) {
      x = std::exp(x - peak);
      total += x;
    }
    double cumulative = 0.0;
    for (std::size_t j = 0; j < log_pmf.size(); ++j) {
      cumulative += log_pmf[j] / total;
      thresholds_[j] = bernoulli_threshold(cumulative);
    }
    thresholds_.back() = std::uint64_t{1} << 53;
  }

  std::int64_t count() const noexcept { return count_; }

  std::int64_t sample(RngStream& rng) const {
    const std::uint64_t u = rng.next_u64() >> 11;
    auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), u);
    return static_cast<std::int64_t>(it - thresholds_.begin());
  }

 private:
  std::int64_t count_ = -1;
  std::vector<std::uint64_t> thresholds_;
};

class SimulatedEnv {
 public:
  SimulatedEnv(const BanditInstance& instance, RngStream& rng, bool record_log)
      : instance_(instance),
        rng_(rng),
        stats_(instance.arms()),
        best_threshold_(bernoulli_threshold((1.0 + instance.gap()) / 2.0)),
        other_threshold_(bernoulli_threshold((1.0 - instance.gap()) / 2.0)) {
    if (record_log) log_.emplace();
  }

  int arms() const noexcept { return instance_.arms(); }
  double gap() const noexcept { return instance_.gap(); }
  bool is_best(int arm) const noexcept { return arm == instance_.best_arm(); }
  RngStream& random() noexcept { return rng_; }

  bool pull(int arm) {
    const bool reward = rng_.bernoulli_with(is_best(arm) ? best_threshold_ : other_threshold_);
    stats_.add(arm, reward);
    if (log_) log_->push_back(PullRecord{arm, reward});
    return reward;
  }

  /// `count` pulls of one arm, drawn as a single binomial. When a log is
  /// kept, the order of ones and zeros within the batch is drawn from a side
  /// stream so the main stream is consumed identically either way.
  std::int64_t pull_batch(int arm, std::int64_t count) {
    if (count <= 0) return 0;
    BinomialTable& table = is_best(arm) ? best_table_ : other_table_;
    if (table.count() != count) table = BinomialTable(count, instance_.reward_probability(arm));
    const std::int64_t ones = table.sample(rng_);
    stats_.add_batch(arm, count, ones);
    if (log_) {
      if (!side_) side_.emplace(mix64(rng_.seed() ^ 0x6a09e667f3bcc909ULL), rng_.index());
      std::int64_t ones_left = ones;
      for (std::int64_t left = count; left > 0; --left) {
        const bool r = static_cast<std::int64_t>(side_->uniform_index(static_cast<std::uint64_t>(left))) < ones_left;
        if (r) --ones_left;
        log_->push_back(PullRecord{arm, r});
      }
    }
    return ones;
  }

  RunOutcome finish(int chosen) && {
    RunOutcome out;
    out.chosen_arm = chosen;
    out.pulls_used = stats_.total_pulls();
    out.stats = std::move(stats_);
    out.log = std::move(log_);
    return out;
  }

 private:
  const BanditInstance& instance_;
  RngStream& rng_;
  SufficientStats stats_;
  std::uint64_t best_threshold_;
  std::uint64_t other_threshold_;
  std::optional<std::vector<PullRecord>> log_;
  BinomialTable best_table_;
  BinomialTable other_table_;
  std::optional<RngStream> side_;
};

static_assert(detail::PullEnvironment<SimulatedEnv>);

template <class Body>
RunOutcome simulate(const BanditInstance& instance, RngStream& rng, const RunOptions& options, Body body) {
  SimulatedEnv env(instance, rng, options.record_log);
  const int chosen = body(env);
  return std::move(env).finish(chosen);
}

}  // namespace

std::string_view cli_name(AlgorithmKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

AlgorithmKind parse_algorithm_kind(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected sprt, msprt, boost, ni, twophase, stopped or guess)");
}

std::string_view model_name(AlgorithmKind kind) {
  return kind == AlgorithmKind::two_phase ? "two_phase" : "standard";
}

void AlgorithmConfig::validate() const {
  check_budget(budget);
  if (kind == AlgorithmKind::boosting) {
    if (!boosting) throw std::invalid_argument("boosting requires repetition count and inner learner");
    if (boosting->repetitions < 1) throw std::invalid_argument("boosting repetitions must be at least 1");
    if (boosting->inner == AlgorithmKind::boosting || boosting->inner == AlgorithmKind::two_phase) {
      throw std::invalid_argument("boosting inner learner must be a standard-model, non-boosting learner");
    }
  } else if (boosting) {
    throw std::invalid_argument("boosting parameters given for a non-boosting learner");
  }
}

ModifiedSprtParams modified_sprt_params(std::int64_t budget, double delta) {
  check_budget(budget);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("modified SPRT needs delta in (0, 1): the upper threshold diverges at delta = 1");
  }
  ModifiedSprtParams p;
  p.explored_arms = std::max<std::int64_t>(1, ceil_count(static_cast<double>(budget) * delta * delta));
  p.lower_threshold = -1.0 / delta;
  p.upper_threshold = std::log(static_cast<double>(p.explored_arms)) / std::log((1.0 + delta) / (1.0 - delta));
  return p;
}

std::int64_t choose_m_non_interactive(std::int64_t budget, double delta) {
  check_budget(budget);
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double allowance = static_cast<double>(budget) * delta * delta;
  const double slack = 1e-9 * std::max(1.0, allowance);
  auto fits = [&](std::int64_t m) {
    const double md = static_cast<double>(m);
    return 4.0 * md * std::log(md) <= allowance + slack;
  };
  // 4 m ln m is increasing for m >= 1: gallop, then bisect.
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

double stopped_run_probability(std::int64_t expected_budget, int arms, double delta) {
  check_budget(expected_budget);
  return std::min(1.0, static_cast<double>(expected_budget) * delta * delta / static_cast<double>(arms));
}

RunOutcome run_sprt(const BanditInstance& instance, std::int64_t budget, RngStream& rng, const RunOptions& options) {
  check_budget(budget);
  return simulate(instance, rng, options,
                  [&](SimulatedEnv& env) { return detail::learn_sprt(env, budget, options.derandomize); });
}

RunOutcome run_modified_sprt(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                             const RunOptions& options) {
  modified_sprt_params(budget, instance.gap());
  return simulate(instance, rng, options,
                  [&](SimulatedEnv& env) { return detail::learn_modified_sprt(env, budget, options.derandomize); });
}

RunOutcome run_boosting(const BanditInstance& instance, std::int64_t inner_budget, int repetitions,
                        AlgorithmKind inner, RngStream& rng, const RunOptions& options) {
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::boosting;
  cfg.budget = inner_budget;
  cfg.boosting = BoostingParams{repetitions, inner};
  cfg.validate();
  return simulate(instance, rng, options, [&](SimulatedEnv& env) {
    return detail::learn_boosting(env, inner_budget, repetitions, inner, options.derandomize);
  });
}

RunOutcome run_non_interactive(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                               const RunOptions& options) {
  check_budget(budget);
  return simulate(instance, rng, options,
                  [&](SimulatedEnv& env) { return detail::learn_non_interactive(env, budget, options.derandomize); });
}

RunOutcome run_two_phase(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                         const RunOptions& options) {
  check_budget(budget);
  return simulate(instance, rng, options, [&](SimulatedEnv& env) { return detail::learn_two_phase(env, budget); });
}

RunOutcome run_stopped(const BanditInstance& instance, std::int64_t expected_budget, RngStream& rng,
                       const RunOptions& options) {
  check_budget(expected_budget);
  return simulate(instance, rng, options, [&](SimulatedEnv& env) {
    return detail::learn_stopped(env, expected_budget, options.derandomize);
  });
}

RunOutcome run_random_guess(const BanditInstance& instance, RngStream& rng, const RunOptions& options) {
  return simulate(instance, rng, options,
                  [&](SimulatedEnv& env) { return detail::learn_random_guess(env, options.derandomize); });
}

RunOutcome run_learner(const AlgorithmConfig& cfg, const BanditInstance& instance, RngStream& rng) {
  cfg.validate();
  if (cfg.kind == AlgorithmKind::modified_sprt) modified_sprt_params(cfg.budget, instance.gap());
  const RunOptions options{cfg.derandomize, cfg.record_log};
  return simulate(instance, rng, options, [&](SimulatedEnv& env) { return detail::learn(env, cfg); });
}

std::int64_t max_pulls(const AlgorithmConfig& cfg, int arms, double delta) {
  cfg.validate();
  const double inv_gap_sq = 1.0 / (delta * delta);
  switch (cfg.kind) {
    case AlgorithmKind::sprt:
    case AlgorithmKind::modified_sprt:
    case AlgorithmKind::non_interactive:
      return cfg.budget;
    case AlgorithmKind::random_guess:
      return 0;
    case AlgorithmKind::stopped:
      return stopped_run_probability(cfg.budget, arms, delta) > 0.0 ? ceil_count(arms * inv_gap_sq) : 0;
    case AlgorithmKind::two_phase:
      return static_cast<std::int64_t>(arms) * ceil_count(inv_gap_sq);
    case AlgorithmKind::boosting: {
      AlgorithmConfig inner;
      inner.kind = cfg.boosting->inner;
      inner.budget = cfg.budget;
      const std::int64_t reps = cfg.boosting->repetitions;
      return reps * max_pulls(inner, arms, delta) + ceil_count(static_cast<double>(reps) * inv_gap_sq);
    }
  }
  return 0;
}

}  // namespace banditlab
