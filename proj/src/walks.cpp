#include "banditlab/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace banditlab {

namespace {

void check_oracle_args(double theta, double delta, std::int64_t horizon) {
  if (!(theta < 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be a finite negative number");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
}

// Distance above the absorbing level beyond which mass is discarded: the
// chance of ever travelling `d` levels against the drift is ratio^d.
std::int64_t window_height(double ratio, double tolerance, std::int64_t horizon) {
  if (ratio <= 0.0) return 1;
  const double levels = std::log(tolerance) / std::log(ratio);
  const double capped = std::min(levels + 1.0, static_cast<double>(horizon) + 1.0);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(capped)));
}

// Rolling DP over positions floor(theta) .. floor(theta) + width. Index 0 is
// absorbing; mass leaving the top of the window is dropped. Calls
// `on_step(live_mass_before_step, absorbed_this_step)` once per step and
// stops early when it returns false.
template <class OnStep>
void run_absorbing_dp(std::int64_t start_index, std::int64_t width, double p_up, double p_down,
                      std::int64_t horizon, OnStep on_step) {
  std::vector<double> cur(static_cast<std::size_t>(width + 2), 0.0);
  std::vector<double> next(cur.size(), 0.0);
  cur[static_cast<std::size_t>(start_index)] = 1.0;
  std::int64_t lo = start_index;
  std::int64_t hi = start_index;
  double live = 1.0;
  for (std::int64_t step = 0; step < horizon; ++step) {
    const std::int64_t new_lo = std::max<std::int64_t>(1, lo - 1);
    const std::int64_t new_hi = std::min(width, hi + 1);
    const double absorbed = lo == 1 ? p_down * cur[1] : 0.0;
    double new_live = 0.0;
    for (std::int64_t i = new_lo; i <= new_hi; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double v = (i - 1 >= lo ? p_up * cur[u - 1] : 0.0) + (i + 1 <= hi ? p_down * cur[u + 1] : 0.0);
      next[u] = v;
      new_live += v;
    }
    for (std::int64_t i = lo; i <= hi; ++i) {
      if (i < new_lo || i > new_hi) next[static_cast<std::size_t>(i)] = 0.0;
    }
    if (!on_step(live, absorbed)) return;
    for (std::int64_t i = lo; i <= hi; ++i) cur[static_cast<std::size_t>(i)] = 0.0;
    std::swap(cur, next);
    lo = new_lo;
    hi = new_hi;
    live = new_live;
  }
}

}  // namespace

WalkOutcome simulate_walk(double bias, double low, std::optional<double> high, std::int64_t budget,
                          RngStream& rng) {
  if (!(bias >= -1.0 && bias <= 1.0)) throw std::invalid_argument("bias must lie in [-1, 1]");
  if (!(low < 0.0)) throw std::invalid_argument("low threshold must be negative");
  if (high && !(*high > 0.0)) throw std::invalid_argument("high threshold must be positive");
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");

  const std::uint64_t up = bernoulli_threshold((1.0 + bias) / 2.0);
  WalkOutcome out;
  while (out.steps_used < budget) {
    out.final_position += rng.bernoulli_with(up) ? 1 : -1;
    ++out.steps_used;
    if (static_cast<double>(out.final_position) <= low) {
      out.terminal = WalkTerminal::hit_low;
      return out;
    }
    if (high && static_cast<double>(out.final_position) >= *high) {
      out.terminal = WalkTerminal::hit_high;
      return out;
    }
  }
  out.terminal = WalkTerminal::budget_exhausted;
  return out;
}

double hitting_prob_oracle(double theta, double delta, std::int64_t horizon) {
  check_oracle_args(theta, delta, horizon);
  const double p_up = (1.0 + delta) / 2.0;
  const double p_down = (1.0 - delta) / 2.0;
  if (p_down == 0.0) return 0.0;
  const auto floor_level = static_cast<std::int64_t>(std::floor(theta));
  const std::int64_t start = -floor_level;
  const std::int64_t width = std::max(start, window_height(p_down / p_up, 1e-20, horizon) + start - 1);

  double hit = 0.0;
  run_absorbing_dp(start, width, p_up, p_down, horizon, [&](double live, double absorbed) {
    hit += absorbed;
    return live > 0.0;
  });
  return std::min(hit, 1.0);
}

double expected_hitting_time_oracle(double theta, double delta, std::int64_t horizon) {
  check_oracle_args(theta, delta, horizon);
  const double p_up = (1.0 - delta) / 2.0;
  const double p_down = (1.0 + delta) / 2.0;
  const auto floor_level = static_cast<std::int64_t>(std::floor(theta));
  const std::int64_t start = -floor_level;
  const double tolerance = 1e-18 / static_cast<double>(horizon);
  const std::int64_t width = std::max(start, window_height(p_up / p_down, tolerance, horizon) + start);

  double expectation = 0.0;
  run_absorbing_dp(start, width, p_up, p_down, horizon, [&](double live, double) {
    expectation += live;
    return live > 1e-40;
  });
  return expectation;
}

double gamblers_ruin_probability(double theta, double delta) {
  if (!(theta < 0.0)) throw std::invalid_argument("theta must be negative");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double levels = -std::floor(theta);
  return std::pow((1.0 - delta) / (1.0 + delta), levels);
}

double wald_hitting_time(double theta, double delta) {
  if (!(theta < 0.0)) throw std::invalid_argument("theta must be negative");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  return -std::floor(theta) / delta;
}

}  // namespace banditlab
