#pragma once

#include <cstdint>
#include <optional>

#include "banditlab/rng.hpp"

namespace banditlab {

enum class WalkTerminal { hit_low, hit_high, budget_exhausted };

struct WalkOutcome {
  WalkTerminal terminal = WalkTerminal::budget_exhausted;
  std::int64_t steps_used = 0;
  std::int64_t final_position = 0;
};

/// Simulates a +-1 walk from 0 that steps up with probability (1 + bias) / 2.
///
/// Stops at the first step where the position is <= low, >= high (when a
/// high threshold is given), or when `budget` steps have been taken.
/// Requires bias in [-1, 1], low < 0, high > 0, budget >= 0.
WalkOutcome simulate_walk(double bias, double low, std::optional<double> high, std::int64_t budget,
                          RngStream& rng);

/// Exact probability that the upward walk (up-probability (1 + delta) / 2)
/// reaches a position <= theta within `horizon` steps, by dynamic programming.
///
/// Positions far above the threshold are dropped once their probability of
/// ever returning falls below 1e-20, which keeps the state window bounded
/// without visible effect on the result.
double hitting_prob_oracle(double theta, double delta, std::int64_t horizon);

/// Exact E[min(T, horizon)] for the downward walk (down-probability
/// (1 + delta) / 2), T the first time the walk is <= theta.
double expected_hitting_time_oracle(double theta, double delta, std::int64_t horizon);

/// ((1 - delta) / (1 + delta))^ceil(|theta|): the infinite-horizon hitting
/// probability of the upward walk. Integer steps must reach floor(theta).
double gamblers_ruin_probability(double theta, double delta);

/// ceil(|theta|) / delta: the infinite-horizon expected hitting time of the
/// downward walk (Wald's identity, no overshoot for +-1 steps).
double wald_hitting_time(double theta, double delta);

}  // namespace banditlab
