// Exhaustive enumeration of a derandomized learner's decision tree.
#include <cmath>
#include <vector>

#include "banditlab/info_metrics.hpp"
#include "learners.hpp"

namespace banditlab {

namespace {

constexpr int kMaxArms = 8;
constexpr std::int64_t kMaxBudget = 20;
constexpr std::size_t kMaxDepth = 24;

struct NeedReward {};

/// Randomness source that refuses to produce randomness.
struct ForbiddenRandom {
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound == 1) return 0;
    throw OracleUnsupported("learner draws internal randomness; the oracle needs a deterministic learner");
  }
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    throw OracleUnsupported("learner draws internal randomness; the oracle needs a deterministic learner");
  }
};

/// Replays a fixed reward prefix and signals when the learner asks for more.
class ScriptedEnv {
 public:
  ScriptedEnv(int arms, double gap, const std::vector<std::uint8_t>& script)
      : arms_(arms), gap_(gap), script_(script) {}

  int arms() const noexcept { return arms_; }
  double gap() const noexcept { return gap_; }
  ForbiddenRandom& random() noexcept { return random_; }

  bool pull(int arm) {
    if (pulled_.size() == script_.size()) throw NeedReward{};
    pulled_.push_back(arm);
    return script_[pulled_.size() - 1] != 0;
  }

  std::int64_t pull_batch(int arm, std::int64_t count) {
    std::int64_t ones = 0;
    for (std::int64_t i = 0; i < count; ++i) ones += pull(arm) ? 1 : 0;
    return ones;
  }

  bool is_best(int) const { throw OracleUnsupported("clean best-arm queries cannot be enumerated"); }

  const std::vector<int>& pulled() const noexcept { return pulled_; }

 private:
  int arms_;
  double gap_;
  const std::vector<std::uint8_t>& script_;
  std::vector<int> pulled_;
  ForbiddenRandom random_;
};

static_assert(detail::PullEnvironment<ScriptedEnv>);

class Enumerator {
 public:
  Enumerator(const AlgorithmConfig& cfg, int arms, double delta) : cfg_(cfg), arms_(arms), delta_(delta) {}

  ExactResult run() {
    std::vector<std::uint8_t> script;
    explore(script);
    return result_;
  }

 private:
  void explore(std::vector<std::uint8_t>& script) {
    ScriptedEnv env(arms_, delta_, script);
    int chosen = 0;
    try {
      chosen = detail::learn(env, cfg_);
    } catch (const NeedReward&) {
      if (script.size() >= kMaxDepth) throw OracleUnsupported("history longer than the oracle's depth limit");
      script.push_back(0);
      explore(script);
      script.back() = 1;
      explore(script);
      script.pop_back();
      return;
    }
    record_leaf(env.pulled(), script, chosen);
  }

  // Likelihood of the history under each hypothesis a* = a, straight from
  // the reward laws; the prior is uniform.
  void record_leaf(const std::vector<int>& arms_pulled, const std::vector<std::uint8_t>& rewards, int chosen) {
    const double p_good = (1.0 + delta_) / 2.0;
    const double p_bad = (1.0 - delta_) / 2.0;
    std::vector<double> likelihood(static_cast<std::size_t>(arms_), 1.0);
    for (int a = 1; a <= arms_; ++a) {
      double lik = 1.0;
      for (std::size_t k = 0; k < arms_pulled.size(); ++k) {
        const double p_one = arms_pulled[k] == a ? p_good : p_bad;
        lik *= rewards[k] != 0 ? p_one : 1.0 - p_one;
      }
      likelihood[static_cast<std::size_t>(a - 1)] = lik;
    }
    double total = 0.0;
    for (double l : likelihood) total += l;
    ++result_.histories;
    if (total <= 0.0) return;

    const auto n = static_cast<double>(arms_);
    result_.success += likelihood[static_cast<std::size_t>(chosen - 1)] / n;
    double kl = 0.0;
    for (double l : likelihood) {
      const double post = l / total;
      if (post > 0.0) kl += post * std::log(n * post);
    }
    result_.mutual_info += (total / n) * kl;
  }

  const AlgorithmConfig& cfg_;
  int arms_;
  double delta_;
  ExactResult result_;
};

}  // namespace

ExactResult exact_small_instance(const AlgorithmConfig& cfg, int arms, double delta) {
  cfg.validate();
  if (arms < 2) throw std::invalid_argument("arm count must be at least 2");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (arms > kMaxArms || cfg.budget > kMaxBudget) {
    throw OracleUnsupported("instance too large for exhaustive enumeration (n <= 8, t <= 20)");
  }
  if (!cfg.derandomize) throw OracleUnsupported("the oracle enumerates derandomized learners only");
  if (cfg.kind == AlgorithmKind::modified_sprt) modified_sprt_params(cfg.budget, delta);
  return Enumerator(cfg, arms, delta).run();
}

}  // namespace banditlab
