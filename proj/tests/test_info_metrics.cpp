#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "banditlab/info_metrics.hpp"
#include "stats_helpers.hpp"

using namespace banditlab;

namespace {

AlgorithmConfig make(AlgorithmKind kind, std::int64_t t, bool derandomize = false) {
  AlgorithmConfig cfg;
  cfg.kind = kind;
  cfg.budget = t;
  cfg.derandomize = derandomize;
  return cfg;
}

SufficientStats stats_from(std::initializer_list<std::int64_t> displacements) {
  SufficientStats st(static_cast<int>(displacements.size()));
  int arm = 1;
  for (std::int64_t c : displacements) {
    const std::int64_t pulls = std::abs(c) + 2;
    st.add_batch(arm++, pulls, (pulls + c) / 2);
  }
  return st;
}

}  // namespace

TEST_SUITE("info_metrics") {

TEST_CASE("posterior from displacements") {
  const Posterior uniform = posterior_from_stats(stats_from({0, 0, 0, 0}), 0.3);
  for (double w : uniform.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-14));

  const Posterior p = posterior_from_stats(stats_from({1, 0, 0}), 1.0 / 3.0);
  CHECK(p.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.weights[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p.weights[2] == doctest::Approx(0.25).epsilon(1e-12));

  const Posterior big = posterior_from_stats(stats_from({1000, 0}), 0.5);
  CHECK(std::isfinite(big.weights[0]));
  CHECK(big.weights[0] >= 1.0 - 1e-12);
  CHECK(std::abs(std::accumulate(big.weights.begin(), big.weights.end(), 0.0) - 1.0) <= 1e-12);

  CHECK_THROWS_AS(posterior_from_stats(stats_from({1, 0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(posterior_from_stats(stats_from({1, 0}), 0.0), std::invalid_argument);
}

TEST_CASE("posterior depends on displacements only") {
  for (std::uint64_t trial = 0; trial < 300; ++trial) {
    RngStream rng(99, trial);
    const int n = 2 + static_cast<int>(rng.uniform_index(12));
    const double delta = 0.05 + 0.9 * rng.uniform01();
    std::vector<PullRecord> log;
    SufficientStats st(n);
    const int len = static_cast<int>(rng.uniform_index(120));
    for (int k = 0; k < len; ++k) {
      const int arm = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      const bool r = rng.bernoulli(0.5);
      log.push_back({arm, r});
      st.add(arm, r);
    }
    const Posterior a = posterior_from_stats(st, delta);
    const Posterior b = posterior_from_log(log, n, delta);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(a.weights[static_cast<std::size_t>(i)] - b.weights[static_cast<std::size_t>(i)]) <= 1e-10);
      CHECK(a.weights[static_cast<std::size_t>(i)] >= 0.0);
      total += a.weights[static_cast<std::size_t>(i)];
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    const double kl = kl_to_uniform(a);
    CHECK(std::abs(posterior_kl_to_uniform(st, delta) - kl) <= 1e-10);
    CHECK(kl >= 0.0);
    CHECK(kl <= std::log(static_cast<double>(n)));
  }
}

TEST_CASE("kl to uniform") {
  CHECK(kl_to_uniform(Posterior{{0.25, 0.25, 0.25, 0.25}}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl_to_uniform(Posterior{{0.0, 1.0, 0.0, 0.0}}) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(kl_to_uniform(Posterior{{0.5, 0.25, 0.25}}) == doctest::Approx(std::log(3.0) - 1.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(kl_to_uniform(Posterior{{0.5, 0.25, 0.25}}) == doctest::Approx(0.05889).epsilon(1e-4));
}

TEST_CASE("bernoulli kl") {
  CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
  CHECK(std::abs(kl_bernoulli(0.25, 0.75) - 0.5 * std::log(3.0)) <= 1e-12);
  CHECK(kl_bernoulli(0.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(std::isinf(kl_bernoulli(0.5, 0.0)));
  CHECK(std::isinf(kl_bernoulli(0.5, 1.0)));
  CHECK(kl_bernoulli(1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(kl_bernoulli(1.5, 0.5), std::invalid_argument);
}

TEST_CASE("binomial total variation") {
  CHECK(tv_binomial(1, 0.25, 0.75) == 0.5);
  CHECK(tv_binomial(0, 0.1, 0.9) == 0.0);
  CHECK(tv_binomial(5, 0.0, 1.0) == 1.0);
  CHECK_THROWS_AS(tv_binomial(-1, 0.5, 0.5), std::invalid_argument);
  for (std::int64_t k : {1, 2, 7, 40, 400}) {
    for (double p : {0.1, 0.45, 0.7}) {
      for (double q : {0.2, 0.5, 0.95}) {
        const double v = tv_binomial(k, p, q);
        CHECK(v == tv_binomial(k, q, p));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
  for (double delta : {0.05, 0.1, 0.25, 0.5}) {
    for (std::int64_t k = 1; static_cast<double>(k) * delta * delta <= 1.0 + 1e-12; ++k) {
      CHECK(tv_binomial(k, (1 - delta) / 2, (1 + delta) / 2) >= 0.3 * std::sqrt(static_cast<double>(k) * delta * delta));
    }
  }
}

TEST_CASE("fano gap") {
  CHECK(fano_gap(1.0 / 8, 0.0, 8) == doctest::Approx(1.0 / 8));
  CHECK(fano_gap(1.0, std::log(8.0), 8) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fano_gap(0.0, 0.1, 8), std::invalid_argument);
  CHECK_THROWS_AS(fano_gap(0.5, 0.1, 0), std::invalid_argument);
}

TEST_CASE("mean accumulator merge equals one pass") {
  MeanAccumulator all, left, right;
  RngStream rng(3, 3);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform01() * 10;
    all.add(x);
    (i < 377 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
  CHECK(left.sample_variance() == doctest::Approx(all.sample_variance()).epsilon(1e-12));
  const EstimateWithCI e = all.estimate();
  CHECK(e.std_error == doctest::Approx(std::sqrt(all.sample_variance() / 1000)));
  MeanAccumulator empty;
  empty.merge(all);
  CHECK(empty.mean() == all.mean());
}

TEST_CASE("wilson half-width") {
  CHECK(wilson_half_width(0.5, 100, 1.96) == doctest::Approx(0.0962).epsilon(1e-3));
  CHECK(wilson_half_width(0.0, 100, 1.96) > 0.0);
  CHECK_THROWS_AS(wilson_half_width(0.5, 0, 1.96), std::invalid_argument);
}

TEST_CASE("success estimates") {
  const auto e = estimate_success(make(AlgorithmKind::sprt, 0), 8, 0.5, 20000, 1);
  CHECK(within_se(e.mean, 1.0 / 8, e.std_error));
  CHECK(e.trials == 20000);

  EstimateRequest req;
  req.algorithm = make(AlgorithmKind::sprt, 0, true);
  req.arms = 8;
  req.delta = 0.5;
  req.trials = 8 * 100;
  req.exhaustive_best_arm = true;
  req.mutual_info = false;
  CHECK(estimate_cell(req).success->mean == 1.0 / 8);

  req.delta = 1.0;
  for (std::int64_t t = 0; t <= 9; ++t) {
    req.algorithm.budget = t;
    CHECK(estimate_cell(req).success->mean == static_cast<double>(std::min<std::int64_t>(t + 1, 8)) / 8);
  }

  const ExactResult exact = exact_small_instance(make(AlgorithmKind::sprt, 3, true), 2, 0.5);
  const auto mc = estimate_success(make(AlgorithmKind::sprt, 3, true), 2, 0.5, 200000, 2);
  CHECK(within_se(mc.mean, exact.success, mc.std_error));
}

TEST_CASE("mutual information estimates") {
  for (AlgorithmKind kind : {AlgorithmKind::sprt, AlgorithmKind::modified_sprt, AlgorithmKind::non_interactive,
                             AlgorithmKind::stopped, AlgorithmKind::random_guess}) {
    const auto zero = estimate_mutual_info(make(kind, 0), 6, 0.4, 1000, 3);
    CHECK(zero.mean == 0.0);
    CHECK(zero.std_error == 0.0);
  }
  const ExactResult near_noiseless = exact_small_instance(make(AlgorithmKind::sprt, 1, true), 2, 0.999);
  CHECK(near_noiseless.mutual_info == doctest::Approx(std::log(2.0)).epsilon(1e-2));
  const auto mc1 = estimate_mutual_info(make(AlgorithmKind::sprt, 1, true), 2, 0.999, 200000, 4);
  CHECK(within_se(mc1.mean, near_noiseless.mutual_info, mc1.std_error));

  const ExactResult two = exact_small_instance(make(AlgorithmKind::sprt, 2, true), 2, 0.5);
  const auto mc2 = estimate_mutual_info(make(AlgorithmKind::sprt, 2, true), 2, 0.5, 200000, 5);
  CHECK(within_se(mc2.mean, two.mutual_info, mc2.std_error));

  CHECK_THROWS_AS(estimate_mutual_info(make(AlgorithmKind::sprt, 5), 4, 1.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_mutual_info(make(AlgorithmKind::two_phase, 5), 4, 0.5, 10, 1), std::invalid_argument);
}

TEST_CASE("estimates do not depend on the number of workers") {
  EstimateRequest req;
  req.algorithm = make(AlgorithmKind::sprt, 300);
  req.arms = 64;
  req.delta = 0.3;
  req.trials = 10000;
  req.seed = 8;
  const CellEstimate a = estimate_cell(req);
  req.jobs = 3;
  const CellEstimate b = estimate_cell(req);
  CHECK(a.success->mean == b.success->mean);
  CHECK(a.success->std_error == b.success->std_error);
  CHECK(a.mutual_info->mean == b.mutual_info->mean);
  CHECK(a.pulls.mean == b.pulls.mean);
  req.trials = 0;
  CHECK_THROWS_AS(estimate_cell(req), std::invalid_argument);
}

TEST_CASE("exact oracle hand enumerations") {
  const ExactResult t0 = exact_small_instance(make(AlgorithmKind::sprt, 0, true), 2, 0.5);
  CHECK(t0.success == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t0.mutual_info == doctest::Approx(0.0));

  const ExactResult a = exact_small_instance(make(AlgorithmKind::sprt, 1, true), 2, 1.0);
  CHECK(a.success == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.mutual_info == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const ExactResult b = exact_small_instance(make(AlgorithmKind::sprt, 1, true), 3, 1.0);
  CHECK(b.success == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(b.mutual_info == doctest::Approx(std::log(3.0) - 2.0 / 3.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("exact oracle matches the stats posterior on a single pull") {
  // One pull of arm 1 at delta = 1/3: posterior (1/2, 1/4, 1/4) or (1/6, 5/12, 5/12).
  const ExactResult r = exact_small_instance(make(AlgorithmKind::sprt, 1, true), 3, 1.0 / 3.0);
  const double p1 = (1.0 / 3) * (2.0 / 3) + (2.0 / 3) * (1.0 / 3);  // marginal of reward 1
  const double kl1 = kl_to_uniform(posterior_from_stats(stats_from({1, 0, 0}), 1.0 / 3.0));
  const double kl0 = kl_to_uniform(posterior_from_stats(stats_from({-1, 0, 0}), 1.0 / 3.0));
  CHECK(r.mutual_info == doctest::Approx(p1 * kl1 + (1 - p1) * kl0).epsilon(1e-13));
}

TEST_CASE("exact oracle limits") {
  CHECK_THROWS_AS(exact_small_instance(make(AlgorithmKind::sprt, 5, false), 2, 0.5), OracleUnsupported);
  CHECK_THROWS_AS(exact_small_instance(make(AlgorithmKind::sprt, 5, true), 9, 0.5), OracleUnsupported);
  CHECK_THROWS_AS(exact_small_instance(make(AlgorithmKind::sprt, 21, true), 2, 0.5), OracleUnsupported);
  CHECK_THROWS_AS(exact_small_instance(make(AlgorithmKind::two_phase, 2, true), 2, 0.5), OracleUnsupported);
  CHECK_THROWS_AS(exact_small_instance(make(AlgorithmKind::stopped, 2, true), 4, 0.5), OracleUnsupported);
  CHECK_THROWS_AS(exact_small_instance(make(AlgorithmKind::sprt, 2, true), 1, 0.5), std::invalid_argument);
}

}  // TEST_SUITE
