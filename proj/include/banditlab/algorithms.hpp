#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "banditlab/core.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

enum class AlgorithmKind {
  sprt,             // sequential probability ratio test scan
  modified_sprt,    // SPRT with an early-return upper threshold over the first w arms
  boosting,         // repeat an inner learner, disambiguate candidates with SPRT
  non_interactive,  // pull the first m arms equally often, return the best total
  two_phase,        // one non-interactive sweep, then clean queries (stronger model)
  stopped,          // SPRT with n / delta^2 rounds run with probability t delta^2 / n
  random_guess,     // return a uniformly random arm without pulling
};

/// Stable command-line vocabulary: sprt, msprt, boost, ni, twophase, stopped, guess.
std::string_view cli_name(AlgorithmKind kind);
/// Inverse of cli_name. Throws std::invalid_argument for unknown names.
AlgorithmKind parse_algorithm_kind(std::string_view name);
/// "two_phase" for the two-phase learner, "standard" for everything else.
std::string_view model_name(AlgorithmKind kind);

struct BoostingParams {
  int repetitions = 1;
  AlgorithmKind inner = AlgorithmKind::sprt;
};

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::sprt;
  /// Pull budget t. For boosting this is the budget of every inner run; for
  /// the stopping-time wrapper it is the expected budget.
  std::int64_t budget = 0;
  /// Present exactly when kind == boosting.
  std::optional<BoostingParams> boosting;
  /// Use the identity arm order instead of a uniform random permutation.
  bool derandomize = false;
  /// Keep the full (arm, reward) log in the outcome.
  bool record_log = false;

  /// Throws std::invalid_argument when kind-specific parameters are missing,
  /// superfluous or out of range.
  void validate() const;
};

struct ModifiedSprtParams {
  std::int64_t explored_arms = 1;  // w = ceil(t delta^2), at least 1
  double lower_threshold = -1.0;   // -1 / delta
  double upper_threshold = 0.0;    // log w / log((1 + delta) / (1 - delta))
};

/// Thresholds of the modified SPRT. Throws for delta outside (0, 1).
ModifiedSprtParams modified_sprt_params(std::int64_t budget, double delta);

/// Largest m >= 1 with 4 m ln m <= t delta^2 (m = 1 always qualifies).
std::int64_t choose_m_non_interactive(std::int64_t budget, double delta);

struct RunOptions {
  bool derandomize = false;
  bool record_log = false;
};

RunOutcome run_sprt(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                    const RunOptions& options = {});
/// Throws std::invalid_argument when the gap is 1 (upper threshold undefined).
RunOutcome run_modified_sprt(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                             const RunOptions& options = {});
/// `inner` supplies the inner learner kind and options; its budget is `inner_budget`.
RunOutcome run_boosting(const BanditInstance& instance, std::int64_t inner_budget, int repetitions,
                        AlgorithmKind inner, RngStream& rng, const RunOptions& options = {});
RunOutcome run_non_interactive(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                               const RunOptions& options = {});
/// Two-phase model learner. Phase-1 pulls are recorded in the outcome; the
/// clean answers of phase 2 are not pulls and are not recorded.
RunOutcome run_two_phase(const BanditInstance& instance, std::int64_t budget, RngStream& rng,
                         const RunOptions& options = {});
RunOutcome run_stopped(const BanditInstance& instance, std::int64_t expected_budget, RngStream& rng,
                       const RunOptions& options = {});
RunOutcome run_random_guess(const BanditInstance& instance, RngStream& rng, const RunOptions& options = {});

/// Dispatches on cfg.kind.
RunOutcome run_learner(const AlgorithmConfig& cfg, const BanditInstance& instance, RngStream& rng);

/// Largest number of pulls a single run can use. For the stopping-time
/// wrapper this is the per-run cap ceil(n / delta^2), not the expected budget.
std::int64_t max_pulls(const AlgorithmConfig& cfg, int arms, double delta);

/// Probability that the stopping-time wrapper runs the full SPRT.
double stopped_run_probability(std::int64_t expected_budget, int arms, double delta);

}  // namespace banditlab
