#include "banditlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace banditlab {

namespace {

constexpr double kCountSlack = 1e-9;

}  // namespace

BanditInstance::BanditInstance(int arms, double gap, int best_arm)
    : arms_(arms), gap_(gap), best_arm_(best_arm) {
  if (arms < 2) throw std::invalid_argument("arm count must be at least 2");
  if (!(gap > 0.0 && gap <= 1.0)) throw std::invalid_argument("gap must lie in (0, 1]");
  if (best_arm < 1 || best_arm > arms) throw std::invalid_argument("best arm out of range");
}

double BanditInstance::reward_probability(int arm) const {
  if (arm < 1 || arm > arms_) throw std::out_of_range("arm " + std::to_string(arm) + " out of range");
  return arm == best_arm_ ? (1.0 + gap_) / 2.0 : (1.0 - gap_) / 2.0;
}

BanditInstance make_instance(int arms, double gap, RngStream& rng) {
  if (arms < 2) throw std::invalid_argument("arm count must be at least 2");
  if (!(gap > 0.0 && gap <= 1.0)) throw std::invalid_argument("gap must lie in (0, 1]");
  const int best = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(arms)));
  return BanditInstance(arms, gap, best);
}

bool sample_reward(const BanditInstance& instance, int arm, RngStream& rng) {
  return rng.bernoulli(instance.reward_probability(arm));
}

SufficientStats::SufficientStats(int arms) : arms_(arms) {
  if (arms < 1) throw std::invalid_argument("arm count must be positive");
}

void SufficientStats::check_arm(int arm) const {
  if (arm < 1 || arm > arms_) throw std::out_of_range("arm " + std::to_string(arm) + " out of range");
}

const ArmTally* SufficientStats::find(int arm) const {
  auto it = std::lower_bound(tallies_.begin(), tallies_.end(), arm,
                             [](const ArmTally& t, int a) { return t.arm < a; });
  if (it == tallies_.end() || it->arm != arm) return nullptr;
  return &*it;
}

ArmTally& SufficientStats::tally_for(int arm) {
  // Learners hammer one arm at a time, so check the last hit first.
  if (last_ < tallies_.size() && tallies_[last_].arm == arm) return tallies_[last_];
  if (tallies_.empty() || tallies_.back().arm < arm) {
    tallies_.push_back(ArmTally{arm, 0, 0});
    last_ = tallies_.size() - 1;
    return tallies_.back();
  }
  auto it = std::lower_bound(tallies_.begin(), tallies_.end(), arm,
                             [](const ArmTally& t, int a) { return t.arm < a; });
  if (it == tallies_.end() || it->arm != arm) it = tallies_.insert(it, ArmTally{arm, 0, 0});
  last_ = static_cast<std::size_t>(it - tallies_.begin());
  return *it;
}

std::int64_t SufficientStats::pulls(int arm) const {
  check_arm(arm);
  const ArmTally* t = find(arm);
  return t ? t->pulls : 0;
}

std::int64_t SufficientStats::displacement(int arm) const {
  check_arm(arm);
  const ArmTally* t = find(arm);
  return t ? t->displacement : 0;
}

void SufficientStats::add_batch(int arm, std::int64_t pulls, std::int64_t ones) {
  check_arm(arm);
  if (pulls < 0 || ones < 0 || ones > pulls) throw std::invalid_argument("invalid pull batch");
  if (pulls == 0) return;
  ArmTally& t = tally_for(arm);
  t.pulls += pulls;
  t.displacement += 2 * ones - pulls;
  total_pulls_ += pulls;
}

std::vector<std::int64_t> SufficientStats::pulls_vector() const {
  std::vector<std::int64_t> out(static_cast<std::size_t>(arms_), 0);
  for (const auto& t : tallies_) out[static_cast<std::size_t>(t.arm - 1)] = t.pulls;
  return out;
}

std::vector<std::int64_t> SufficientStats::displacement_vector() const {
  std::vector<std::int64_t> out(static_cast<std::size_t>(arms_), 0);
  for (const auto& t : tallies_) out[static_cast<std::size_t>(t.arm - 1)] = t.displacement;
  return out;
}

SufficientStats record_pull(SufficientStats stats, int arm, bool reward) {
  stats.add(arm, reward);
  return stats;
}

std::int64_t ceil_count(double x) {
  return static_cast<std::int64_t>(std::ceil(x - kCountSlack * std::max(1.0, std::abs(x))));
}

std::int64_t floor_count(double x) {
  return static_cast<std::int64_t>(std::floor(x + kCountSlack * std::max(1.0, std::abs(x))));
}

}  // namespace banditlab
