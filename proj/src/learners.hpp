// Learner bodies shared by the Monte Carlo runner and the exact enumeration
// oracle. Each learner is a template over an environment that answers pulls
// and supplies the learner's own randomness, so the oracle can replay the
// very same code against scripted reward sequences.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "banditlab/algorithms.hpp"
#include "banditlab/core.hpp"

namespace banditlab::detail {

template <class R>
concept RandomSource = requires(R& r, std::uint64_t bound, double p) {
  { r.uniform_index(bound) } -> std::convertible_to<std::uint64_t>;
  { r.bernoulli(p) } -> std::same_as<bool>;
};

template <class E>
concept PullEnvironment = requires(E& e, int arm, std::int64_t count) {
  { e.arms() } -> std::same_as<int>;
  { e.gap() } -> std::same_as<double>;
  { e.pull(arm) } -> std::same_as<bool>;
  { e.pull_batch(arm, count) } -> std::same_as<std::int64_t>;
  { e.is_best(arm) } -> std::same_as<bool>;
  requires RandomSource<std::remove_reference_t<decltype(e.random())>>;
};

/// Scan order over a set of arms. Random orders are drawn lazily by a
/// Fisher-Yates pass that materialises positions on first access, so a
/// learner that inspects only a handful of arms never pays for the rest.
/// Positions must be requested in nondecreasing order of first access.
template <RandomSource Random>
class ArmOrder {
 public:
  /// All arms 1..n; `rng == nullptr` gives the identity order.
  ArmOrder(int arms, Random* rng) : size_(arms), rng_(rng) {}
  /// A subset of arms in the given base order.
  ArmOrder(std::vector<int> base, Random* rng)
      : size_(static_cast<int>(base.size())), base_(std::move(base)), rng_(rng) {}

  int size() const noexcept { return size_; }

  int arm_at(int pos) {
    while (materialized_ <= pos) {
      const int j = materialized_;
      if (rng_ != nullptr && j + 1 < size_) {
        const int r = j + static_cast<int>(rng_->uniform_index(static_cast<std::uint64_t>(size_ - j)));
        if (r != j) {
          const int a = slot(j);
          const int b = slot(r);
          swapped_[j] = b;
          swapped_[r] = a;
        }
      }
      ++materialized_;
    }
    const int s = slot(pos);
    return base_.empty() ? s + 1 : base_[static_cast<std::size_t>(s)];
  }

 private:
  int slot(int i) const {
    auto it = swapped_.find(i);
    return it == swapped_.end() ? i : it->second;
  }

  int size_;
  std::vector<int> base_;
  Random* rng_;
  std::unordered_map<int, int> swapped_;
  int materialized_ = 0;
};

template <class Env>
using RandomOf = std::remove_reference_t<decltype(std::declval<Env&>().random())>;

template <PullEnvironment Env>
ArmOrder<RandomOf<Env>> full_order(Env& env, bool derandomize) {
  return ArmOrder<RandomOf<Env>>(env.arms(), derandomize ? nullptr : &env.random());
}

/// Core SPRT scan: walk each arm in order until its displacement drops to
/// `theta` or below, return the arm in hand when the budget runs out, and
/// fall back to the first arm when every arm is eliminated.
template <PullEnvironment Env, class Order>
int sprt_scan(Env& env, Order& order, std::int64_t budget, double theta, std::int64_t& used) {
  for (int pos = 0; pos < order.size(); ++pos) {
    const int arm = order.arm_at(pos);
    std::int64_t walk = 0;
    while (true) {
      if (used == budget) return arm;
      walk += env.pull(arm) ? 1 : -1;
      ++used;
      if (static_cast<double>(walk) <= theta) break;
    }
  }
  return order.arm_at(0);
}

template <PullEnvironment Env>
int learn_sprt(Env& env, std::int64_t budget, bool derandomize) {
  auto order = full_order(env, derandomize);
  std::int64_t used = 0;
  return sprt_scan(env, order, budget, -1.0 / env.gap(), used);
}

template <PullEnvironment Env>
int learn_modified_sprt(Env& env, std::int64_t budget, bool derandomize) {
  const ModifiedSprtParams params = modified_sprt_params(budget, env.gap());
  auto order = full_order(env, derandomize);
  const int explored = static_cast<int>(std::min<std::int64_t>(params.explored_arms, env.arms()));
  std::int64_t used = 0;
  for (int pos = 0; pos < explored; ++pos) {
    const int arm = order.arm_at(pos);
    std::int64_t walk = 0;
    while (true) {
      if (used == budget) return arm;
      walk += env.pull(arm) ? 1 : -1;
      ++used;
      if (static_cast<double>(walk) >= params.upper_threshold) return arm;
      if (static_cast<double>(walk) <= params.lower_threshold) break;
    }
  }
  return order.arm_at(0);
}

/// Per-arm pull count of the non-interactive learner when it spreads its
/// budget over m >= 2 arms; the product with m never exceeds the budget.
inline std::int64_t non_interactive_repeats(std::int64_t budget, double delta, std::int64_t m) {
  std::int64_t repeats = floor_count(4.0 * std::log(static_cast<double>(m)) / (delta * delta));
  while (repeats > 0 && repeats * m > budget) --repeats;
  return repeats;
}

template <PullEnvironment Env>
int learn_non_interactive(Env& env, std::int64_t budget, bool derandomize) {
  auto order = full_order(env, derandomize);
  const std::int64_t m = std::min<std::int64_t>(choose_m_non_interactive(budget, env.gap()), env.arms());
  if (m == 1) {
    const int arm = order.arm_at(0);
    for (std::int64_t i = 0; i < budget; ++i) env.pull(arm);
    return arm;
  }
  const std::int64_t repeats = non_interactive_repeats(budget, env.gap(), m);
  int best_arm = order.arm_at(0);
  std::int64_t best_total = -1;
  for (int pos = 0; pos < static_cast<int>(m); ++pos) {
    const int arm = order.arm_at(pos);
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < repeats; ++i) total += env.pull(arm) ? 1 : 0;
    if (total > best_total) {  // strict: ties keep the earliest position
      best_total = total;
      best_arm = arm;
    }
  }
  return best_arm;
}

template <PullEnvironment Env>
int learn_two_phase(Env& env, std::int64_t budget) {
  const int n = env.arms();
  const double delta = env.gap();
  const std::int64_t per_arm = ceil_count(1.0 / (delta * delta));
  std::vector<std::int64_t> totals(static_cast<std::size_t>(n));
  for (int arm = 1; arm <= n; ++arm) totals[static_cast<std::size_t>(arm - 1)] = env.pull_batch(arm, per_arm);

  const auto m = static_cast<int>(std::clamp<std::int64_t>(ceil_count(static_cast<double>(budget) * delta * delta), 1, n));
  std::vector<std::int64_t> sorted = totals;
  std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end(), std::greater<>());
  const std::int64_t cutoff = sorted[static_cast<std::size_t>(m - 1)];

  std::vector<int> selected;
  std::vector<int> tied;
  selected.reserve(static_cast<std::size_t>(m));
  for (int arm = 1; arm <= n; ++arm) {
    const std::int64_t r = totals[static_cast<std::size_t>(arm - 1)];
    if (r > cutoff) selected.push_back(arm);
    else if (r == cutoff) tied.push_back(arm);
  }
  const std::size_t need = static_cast<std::size_t>(m) - selected.size();
  if (need < tied.size()) {
    auto& rng = env.random();
    for (std::size_t j = 0; j < need; ++j) {
      const std::size_t r = j + static_cast<std::size_t>(rng.uniform_index(tied.size() - j));
      std::swap(tied[j], tied[r]);
    }
  }
  selected.insert(selected.end(), tied.begin(), tied.begin() + static_cast<std::ptrdiff_t>(need));

  for (int arm : selected) {
    if (env.is_best(arm)) return arm;
  }
  return selected[static_cast<std::size_t>(env.random().uniform_index(selected.size()))];
}

template <PullEnvironment Env>
int learn_random_guess(Env& env, bool derandomize) {
  auto order = full_order(env, derandomize);
  return order.arm_at(0);
}

template <PullEnvironment Env>
int learn_stopped(Env& env, std::int64_t expected_budget, bool derandomize) {
  const double q = stopped_run_probability(expected_budget, env.arms(), env.gap());
  bool run_full = q >= 1.0;
  if (q > 0.0 && q < 1.0) run_full = env.random().bernoulli(q);
  if (!run_full) return learn_random_guess(env, derandomize);
  const double delta = env.gap();
  return learn_sprt(env, ceil_count(static_cast<double>(env.arms()) / (delta * delta)), derandomize);
}

template <PullEnvironment Env>
int learn_single(Env& env, AlgorithmKind kind, std::int64_t budget, bool derandomize) {
  switch (kind) {
    case AlgorithmKind::sprt: return learn_sprt(env, budget, derandomize);
    case AlgorithmKind::modified_sprt: return learn_modified_sprt(env, budget, derandomize);
    case AlgorithmKind::non_interactive: return learn_non_interactive(env, budget, derandomize);
    case AlgorithmKind::two_phase: return learn_two_phase(env, budget);
    case AlgorithmKind::stopped: return learn_stopped(env, budget, derandomize);
    case AlgorithmKind::random_guess: return learn_random_guess(env, derandomize);
    case AlgorithmKind::boosting: break;
  }
  throw std::invalid_argument("boosting cannot be nested");
}

template <PullEnvironment Env>
int learn_boosting(Env& env, std::int64_t inner_budget, int repetitions, AlgorithmKind inner, bool derandomize) {
  std::vector<int> candidates;
  for (int rep = 0; rep < repetitions; ++rep) {
    const int found = learn_single(env, inner, inner_budget, derandomize);
    if (std::find(candidates.begin(), candidates.end(), found) == candidates.end()) candidates.push_back(found);
  }
  const double delta = env.gap();
  const std::int64_t final_budget = ceil_count(static_cast<double>(candidates.size()) / (delta * delta));
  ArmOrder<RandomOf<Env>> order(std::move(candidates), derandomize ? nullptr : &env.random());
  std::int64_t used = 0;
  return sprt_scan(env, order, final_budget, -1.0 / delta, used);
}

template <PullEnvironment Env>
int learn(Env& env, const AlgorithmConfig& cfg) {
  if (cfg.kind == AlgorithmKind::boosting) {
    return learn_boosting(env, cfg.budget, cfg.boosting->repetitions, cfg.boosting->inner, cfg.derandomize);
  }
  return learn_single(env, cfg.kind, cfg.budget, cfg.derandomize);
}

}  // namespace banditlab::detail
