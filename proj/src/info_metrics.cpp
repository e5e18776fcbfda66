#include "banditlab/info_metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace banditlab {

namespace {

void check_open_gap(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("posterior needs delta in (0, 1): the likelihood ratio degenerates at 0 and 1");
  }
}

double clamp_kl(double kl, int arms) {
  return std::clamp(kl, 0.0, std::log(static_cast<double>(arms)));
}

Posterior normalise_log_weights(std::vector<double> log_w) {
  const double peak = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  for (double& x : log_w) {
    x = std::exp(x - peak);
    total += x;
  }
  for (double& x : log_w) x /= total;
  return Posterior{std::move(log_w)};
}

// log pmf of Bin(k, p) at j with 0 log 0 = 0.
double binomial_log_pmf(std::int64_t k, std::int64_t j, double p) {
  const auto kd = static_cast<double>(k);
  const auto jd = static_cast<double>(j);
  double x = std::lgamma(kd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(kd - jd + 1.0);
  if (j > 0) x += jd * std::log(p);
  if (k - j > 0) x += (kd - jd) * std::log1p(-p);
  return x;
}

}  // namespace

Posterior posterior_from_stats(const SufficientStats& stats, double delta) {
  check_open_gap(delta);
  const double log_ratio = std::log((1.0 + delta) / (1.0 - delta));
  std::vector<double> log_w(static_cast<std::size_t>(stats.arms()), 0.0);
  for (const ArmTally& t : stats.touched()) {
    log_w[static_cast<std::size_t>(t.arm - 1)] = static_cast<double>(t.displacement) * log_ratio;
  }
  return normalise_log_weights(std::move(log_w));
}

Posterior posterior_from_log(std::span<const PullRecord> log, int arms, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double good[2] = {std::log1p(-(1.0 + delta) / 2.0), std::log((1.0 + delta) / 2.0)};
  const double bad[2] = {std::log1p(-(1.0 - delta) / 2.0), std::log((1.0 - delta) / 2.0)};
  std::vector<double> log_lik(static_cast<std::size_t>(arms), 0.0);
  for (int candidate = 1; candidate <= arms; ++candidate) {
    double sum = 0.0;
    for (const PullRecord& rec : log) {
      if (rec.arm < 1 || rec.arm > arms) throw std::out_of_range("pull log arm out of range");
      sum += (rec.arm == candidate ? good : bad)[rec.reward ? 1 : 0];
    }
    log_lik[static_cast<std::size_t>(candidate - 1)] = sum;
  }
  return normalise_log_weights(std::move(log_lik));
}

double kl_to_uniform(const Posterior& posterior) {
  const auto n = static_cast<double>(posterior.weights.size());
  double kl = 0.0;
  for (double p : posterior.weights) {
    if (p > 0.0) kl += p * std::log(n * p);
  }
  return clamp_kl(kl, static_cast<int>(posterior.weights.size()));
}

double posterior_kl_to_uniform(const SufficientStats& stats, double delta) {
  check_open_gap(delta);
  const double log_ratio = std::log((1.0 + delta) / (1.0 - delta));
  double peak = 0.0;
  std::int64_t neutral = stats.arms();  // arms with displacement 0 share log-weight 0
  for (const ArmTally& t : stats.touched()) {
    if (t.displacement != 0) {
      --neutral;
      peak = std::max(peak, static_cast<double>(t.displacement) * log_ratio);
    }
  }
  const double neutral_w = std::exp(-peak);
  double z = static_cast<double>(neutral) * neutral_w;
  for (const ArmTally& t : stats.touched()) {
    if (t.displacement != 0) z += std::exp(static_cast<double>(t.displacement) * log_ratio - peak);
  }
  const double log_z = std::log(z);
  const double log_n = std::log(static_cast<double>(stats.arms()));
  // sum_i p_i ln(n p_i) with ln p_i = x_i - peak - ln z.
  double kl = 0.0;
  if (neutral > 0) kl += static_cast<double>(neutral) * (neutral_w / z) * (log_n - peak - log_z);
  for (const ArmTally& t : stats.touched()) {
    if (t.displacement == 0) continue;
    const double x = static_cast<double>(t.displacement) * log_ratio - peak;
    const double p = std::exp(x) / z;
    if (p > 0.0) kl += p * (log_n + x - log_z);
  }
  return clamp_kl(kl, stats.arms());
}

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("Bernoulli parameters must lie in [0, 1]");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  double kl = 0.0;
  if (p > 0.0) kl += q > 0.0 ? p * std::log(p / q) : inf;
  if (p < 1.0) kl += q < 1.0 ? (1.0 - p) * std::log((1.0 - p) / (1.0 - q)) : inf;
  return kl;
}

double tv_binomial(std::int64_t trials, double p, double q) {
  if (trials < 0) throw std::invalid_argument("trial count must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("Bernoulli parameters must lie in [0, 1]");
  }
  auto pmf = [trials](std::int64_t j, double prob) {
    if (prob == 0.0) return j == 0 ? 1.0 : 0.0;
    if (prob == 1.0) return j == trials ? 1.0 : 0.0;
    return std::exp(binomial_log_pmf(trials, j, prob));
  };
  double sum = 0.0;
  for (std::int64_t j = 0; j <= trials; ++j) sum += std::abs(pmf(j, p) - pmf(j, q));
  return std::min(1.0, 0.5 * sum);
}

double fano_gap(double p, double i, int arms) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("success probability must lie in (0, 1]");
  if (arms < 1) throw std::invalid_argument("arm count must be positive");
  return i - p * (std::log(static_cast<double>(arms) * p) - 1.0);
}

void MeanAccumulator::merge(const MeanAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double d = other.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  count_ += other.count_;
  add_to_sum(other.sum_);
  add_to_sum(other.carry_);
}

EstimateWithCI MeanAccumulator::estimate() const noexcept {
  EstimateWithCI e;
  e.mean = mean();
  e.trials = count_;
  e.std_error = count_ > 0 ? std::sqrt(sample_variance() / static_cast<double>(count_)) : 0.0;
  return e;
}

double wilson_half_width(double p_hat, std::int64_t trials, double z) {
  if (trials <= 0) throw std::invalid_argument("trial count must be positive");
  const auto n = static_cast<double>(trials);
  const double z2 = z * z;
  return z / (1.0 + z2 / n) * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
}

namespace {

constexpr std::int64_t kBlockTrials = 2048;

struct BlockTotals {
  MeanAccumulator success;
  MeanAccumulator info;
  MeanAccumulator pulls;
};

BlockTotals run_block(const EstimateRequest& req, std::int64_t first, std::int64_t last) {
  BlockTotals totals;
  for (std::int64_t trial = first; trial < last; ++trial) {
    RngStream rng(req.seed, static_cast<std::uint64_t>(trial));
    const BanditInstance instance =
        req.exhaustive_best_arm ? BanditInstance(req.arms, req.delta, 1 + static_cast<int>(trial % req.arms))
                                : make_instance(req.arms, req.delta, rng);
    const RunOutcome out = run_learner(req.algorithm, instance, rng);
    if (req.success) totals.success.add(out.chosen_arm == instance.best_arm() ? 1.0 : 0.0);
    if (req.mutual_info) totals.info.add(posterior_kl_to_uniform(out.stats, req.delta));
    totals.pulls.add(static_cast<double>(out.pulls_used));
  }
  return totals;
}

}  // namespace

CellEstimate estimate_cell(const EstimateRequest& req) {
  if (req.trials < 1) throw std::invalid_argument("trials must be at least 1");
  req.algorithm.validate();
  if (req.arms < 2) throw std::invalid_argument("arm count must be at least 2");
  if (!(req.delta > 0.0 && req.delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (req.mutual_info) {
    check_open_gap(req.delta);
    if (req.algorithm.kind == AlgorithmKind::two_phase) {
      throw std::invalid_argument("mutual information is not defined for the two-phase model's pull history");
    }
  }
  if (req.algorithm.kind == AlgorithmKind::modified_sprt) modified_sprt_params(req.algorithm.budget, req.delta);

  const std::int64_t blocks = (req.trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<BlockTotals> results(static_cast<std::size_t>(blocks));
  auto work = [&](std::int64_t b) {
    const std::int64_t first = b * kBlockTrials;
    results[static_cast<std::size_t>(b)] = run_block(req, first, std::min(req.trials, first + kBlockTrials));
  };

  int jobs = req.jobs > 0 ? req.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = static_cast<int>(std::min<std::int64_t>(jobs, blocks));
  if (jobs <= 1) {
    for (std::int64_t b = 0; b < blocks; ++b) work(b);
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::int64_t b = next++; b < blocks && !failed; b = next++) {
          try {
            work(b);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
  }

  BlockTotals merged;
  for (const BlockTotals& r : results) {
    merged.success.merge(r.success);
    merged.info.merge(r.info);
    merged.pulls.merge(r.pulls);
  }
  CellEstimate cell;
  if (req.success) cell.success = merged.success.estimate();
  if (req.mutual_info) cell.mutual_info = merged.info.estimate();
  cell.pulls = merged.pulls.estimate();
  return cell;
}

EstimateWithCI estimate_success(const AlgorithmConfig& cfg, int arms, double delta, std::int64_t trials,
                                std::uint64_t seed, int jobs) {
  EstimateRequest req;
  req.algorithm = cfg;
  req.arms = arms;
  req.delta = delta;
  req.trials = trials;
  req.seed = seed;
  req.mutual_info = false;
  req.jobs = jobs;
  return *estimate_cell(req).success;
}

EstimateWithCI estimate_mutual_info(const AlgorithmConfig& cfg, int arms, double delta, std::int64_t trials,
                                    std::uint64_t seed, int jobs) {
  EstimateRequest req;
  req.algorithm = cfg;
  req.arms = arms;
  req.delta = delta;
  req.trials = trials;
  req.seed = seed;
  req.success = false;
  req.jobs = jobs;
  return *estimate_cell(req).mutual_info;
}

}  // namespace banditlab
