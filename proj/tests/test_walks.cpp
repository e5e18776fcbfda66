#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "banditlab/walks.hpp"
#include "stats_helpers.hpp"

using namespace banditlab;

TEST_SUITE("walks") {

TEST_CASE("deterministic walks") {
  RngStream rng(1, 1);
  const WalkOutcome down = simulate_walk(-1.0, -1.0, std::nullopt, 10, rng);
  CHECK(down.terminal == WalkTerminal::hit_low);
  CHECK(down.steps_used == 1);
  CHECK(down.final_position == -1);

  const WalkOutcome up = simulate_walk(1.0, -1.0, std::nullopt, 10, rng);
  CHECK(up.terminal == WalkTerminal::budget_exhausted);
  CHECK(up.final_position == 10);
  CHECK(up.steps_used == 10);

  const WalkOutcome capped = simulate_walk(1.0, -1.0, 2.5, 10, rng);
  CHECK(capped.terminal == WalkTerminal::hit_high);
  CHECK(capped.final_position == 3);

  const WalkOutcome none = simulate_walk(0.3, -1.0, std::nullopt, 0, rng);
  CHECK(none.terminal == WalkTerminal::budget_exhausted);
  CHECK(none.steps_used == 0);
}

TEST_CASE("walk argument checks") {
  RngStream rng(1, 1);
  CHECK_THROWS_AS(simulate_walk(0.5, 0.0, std::nullopt, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_walk(0.5, -1.0, 0.0, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_walk(0.5, -1.0, std::nullopt, -1, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_walk(1.5, -1.0, std::nullopt, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(hitting_prob_oracle(0.0, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(hitting_prob_oracle(1.0, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(expected_hitting_time_oracle(0.0, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(hitting_prob_oracle(-1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(hitting_prob_oracle(-1.0, 0.5, 0), std::invalid_argument);
}

TEST_CASE("terminal states respect the thresholds") {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    RngStream rng(44, i);
    const double low = -1.0 - static_cast<double>(rng.uniform_index(5)) - 0.5 * static_cast<double>(rng.uniform_index(2));
    const double high = 0.5 + static_cast<double>(rng.uniform_index(5));
    const double bias = rng.uniform01() * 2.0 - 1.0;
    const auto budget = static_cast<std::int64_t>(rng.uniform_index(40));
    const WalkOutcome w = simulate_walk(bias, low, high, budget, rng);
    REQUIRE(w.steps_used <= budget);
    REQUIRE(std::abs(w.final_position) <= w.steps_used);
    switch (w.terminal) {
      case WalkTerminal::hit_low: CHECK(w.final_position <= low); break;
      case WalkTerminal::hit_high: CHECK(w.final_position >= high); break;
      case WalkTerminal::budget_exhausted:
        CHECK(w.steps_used == budget);
        CHECK(w.final_position > low);
        CHECK(w.final_position < high);
        break;
    }
  }
}

TEST_CASE("Monte Carlo ruin fraction matches 1/3") {
  constexpr int kTrials = 100000;
  int hits = 0;
  for (int i = 0; i < kTrials; ++i) {
    RngStream rng(303, static_cast<std::uint64_t>(i));
    // A walk still alive after 10^4 steps sits near +5000; its chance of ever
    // returning is (1/3)^5000, so a longer budget cannot change any outcome.
    hits += simulate_walk(0.5, -1.0, std::nullopt, 10000, rng).terminal == WalkTerminal::hit_low ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / kTrials;
  CHECK(within_se(p, 1.0 / 3.0, std::sqrt((1.0 / 3) * (2.0 / 3) / kTrials)));
  CHECK(hitting_prob_oracle(-1.0, 0.5, 1000000) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("hitting probability oracle") {
  CHECK(std::abs(hitting_prob_oracle(-1.0, 0.5, 10000) - 1.0 / 3.0) <= 1e-6);
  CHECK(std::abs(hitting_prob_oracle(-2.0, 0.5, 10000) - 1.0 / 9.0) <= 1e-6);
  CHECK(hitting_prob_oracle(-1.0, 1.0, 50) == 0.0);
  CHECK(hitting_prob_oracle(-3.0, 0.2, 2) == 0.0);  // needs at least 3 steps
  CHECK(hitting_prob_oracle(-1.0, 0.2, 1) == doctest::Approx(0.4));
}

TEST_CASE("hitting probability is monotone in the horizon and bounded") {
  for (double theta : {-1.0, -2.5, -4.0}) {
    for (double delta : {0.1, 0.3, 0.6}) {
      double prev = 0.0;
      for (std::int64_t h : {1, 3, 10, 30, 100, 300, 1000, 3000}) {
        const double p = hitting_prob_oracle(theta, delta, h);
        CHECK(p >= prev - 1e-15);
        prev = p;
        const double ratio_bound = std::pow((1 - delta) / (1 + delta), -theta);
        CHECK(p <= ratio_bound + 1e-12);
        CHECK(ratio_bound <= std::exp(2 * delta * theta) + 1e-15);
      }
    }
  }
}

TEST_CASE("fractional threshold reaches floor(theta)") {
  const double rho = (1 - 0.5) / (1 + 0.5);
  CHECK(hitting_prob_oracle(-1.5, 0.5, 20000) == doctest::Approx(rho * rho).epsilon(1e-9));
  CHECK(gamblers_ruin_probability(-1.5, 0.5) == doctest::Approx(rho * rho));
  CHECK(wald_hitting_time(-1.5, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("expected hitting time oracle") {
  CHECK(expected_hitting_time_oracle(-1.0, 1.0, 10) == doctest::Approx(1.0));
  CHECK(std::abs(expected_hitting_time_oracle(-1.0, 0.5, 100000) - 2.0) <= 1e-3);
  CHECK(std::abs(expected_hitting_time_oracle(-3.0, 0.5, 100000) - 6.0) <= 1e-2);
  // T = 2 with probability 0.625^2, otherwise min(T, 3) = 3.
  CHECK(expected_hitting_time_oracle(-2.0, 0.25, 3) == doctest::Approx(2 * 0.390625 + 3 * 0.609375));
  for (double theta : {-1.0, -2.0, -5.0}) {
    for (double delta : {0.1, 0.4}) {
      double prev = 0.0;
      for (std::int64_t h : {5, 50, 500, 5000}) {
        const double e = expected_hitting_time_oracle(theta, delta, h);
        CHECK(e >= prev);
        CHECK(e <= -theta / delta + 1e-9);
        prev = e;
      }
    }
  }
}

TEST_CASE("DP oracle agrees with Monte Carlo within 4 se") {
  constexpr int kTrials = 100000;
  std::uint64_t stream = 0;
  for (double theta : {-1.0, -3.0}) {
    for (double delta : {0.25, 0.5}) {
      const std::int64_t horizon = 60;
      int hits = 0;
      for (int i = 0; i < kTrials; ++i) {
        RngStream rng(808, stream++);
        hits += simulate_walk(delta, theta, std::nullopt, horizon, rng).terminal == WalkTerminal::hit_low ? 1 : 0;
      }
      const double p = hitting_prob_oracle(theta, delta, horizon);
      CHECK(within_se(static_cast<double>(hits) / kTrials, p, std::sqrt(p * (1 - p) / kTrials), 4.0));
    }
  }
}

TEST_CASE("closed forms") {
  CHECK(gamblers_ruin_probability(-2.0, 0.5) == doctest::Approx(1.0 / 9.0));
  CHECK(wald_hitting_time(-3.0, 0.5) == doctest::Approx(6.0));
}

}  // TEST_SUITE
