#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "banditlab/algorithms.hpp"
#include "banditlab/core.hpp"

namespace banditlab {

/// Posterior over the best arm; weights[i] belongs to arm i + 1.
struct Posterior {
  std::vector<double> weights;
};

/// Posterior of the best arm under the uniform prior: weight of arm i is
/// proportional to ((1 + delta) / (1 - delta))^{c_i}. Depends on the
/// displacements only. Normalised in the log domain with a max shift.
/// Throws std::invalid_argument unless 0 < delta < 1.
Posterior posterior_from_stats(const SufficientStats& stats, double delta);

/// Bayes posterior computed directly from the pull log as a product of
/// per-pull likelihoods, without going through displacements.
Posterior posterior_from_log(std::span<const PullRecord> log, int arms, double delta);

/// KL(posterior || Unif([n])) in nats, with 0 ln 0 = 0. Lies in [0, ln n].
double kl_to_uniform(const Posterior& posterior);

/// Same quantity as kl_to_uniform(posterior_from_stats(stats, delta)) but
/// summed over pulled arms only; unpulled arms share one weight.
double posterior_kl_to_uniform(const SufficientStats& stats, double delta);

/// KL(Ber(p) || Ber(q)) in nats; +infinity when p puts mass where q has none.
double kl_bernoulli(double p, double q);

/// Exact TV(Bin(k, p), Bin(k, q)) from log-domain pmfs.
double tv_binomial(std::int64_t trials, double p, double q);

/// i - p ln(n p / e). Nonnegative values are consistent with Fano's inequality.
double fano_gap(double p, double i, int arms);

struct EstimateWithCI {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(trials)
  std::int64_t trials = 0;
};

/// Mergeable (count, mean, M2) accumulator (Welford / Chan et al.).
class MeanAccumulator {
 public:
  void add(double x) noexcept {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
    add_to_sum(x);
  }

  void merge(const MeanAccumulator& other) noexcept;

  std::int64_t count() const noexcept { return count_; }
  /// sum / count from a compensated sum, so means of 0/1 indicators are exact.
  double mean() const noexcept { return count_ > 0 ? (sum_ + carry_) / static_cast<double>(count_) : 0.0; }
  double sample_variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  EstimateWithCI estimate() const noexcept;

 private:
  // Neumaier summation
  void add_to_sum(double x) noexcept {
    const double t = sum_ + x;
    carry_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }

  std::int64_t count_ = 0;
  double mean_ = 0.0;  // running mean, only used for M2 updates
  double m2_ = 0.0;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Wilson score interval half-width at z standard normal quantiles.
double wilson_half_width(double p_hat, std::int64_t trials, double z);

struct EstimateRequest {
  AlgorithmConfig algorithm;
  int arms = 2;
  double delta = 0.5;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  bool success = true;
  bool mutual_info = true;
  /// Place the best arm at position 1 + (trial mod n) instead of drawing it.
  bool exhaustive_best_arm = false;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  int jobs = 1;
};

struct CellEstimate {
  std::optional<EstimateWithCI> success;
  std::optional<EstimateWithCI> mutual_info;
  EstimateWithCI pulls;
};

/// Runs `trials` independent trials (trial i uses stream (seed, i)) and
/// aggregates success indicator, posterior KL to uniform, and pulls used.
/// Trials are grouped into fixed blocks merged in block order, so the result
/// is bit-identical for any number of jobs.
CellEstimate estimate_cell(const EstimateRequest& request);

EstimateWithCI estimate_success(const AlgorithmConfig& cfg, int arms, double delta, std::int64_t trials,
                                std::uint64_t seed, int jobs = 1);
/// Throws std::invalid_argument unless 0 < delta < 1, and for the two-phase
/// learner, whose clean answers are not part of the pull history.
EstimateWithCI estimate_mutual_info(const AlgorithmConfig& cfg, int arms, double delta, std::int64_t trials,
                                    std::uint64_t seed, int jobs = 1);

class OracleUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactResult {
  double success = 0.0;
  double mutual_info = 0.0;
  std::int64_t histories = 0;
};

/// Exact success probability and I(a*; H_t) for a derandomized learner on a
/// small instance, by depth-first enumeration of every reward sequence the
/// learner can elicit. The posterior for each history is built from
/// likelihood products, independently of posterior_from_stats.
///
/// Throws OracleUnsupported when the learner uses internal randomness, the
/// config is not derandomized, n > 8, t > 20 or a history exceeds 24 pulls.
ExactResult exact_small_instance(const AlgorithmConfig& cfg, int arms, double delta);

}  // namespace banditlab
