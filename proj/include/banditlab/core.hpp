#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

/// Hidden environment: n arms, one of which (best_arm) pays Ber((1+gap)/2)
/// while the others pay Ber((1-gap)/2). Arms are numbered 1..n.
class BanditInstance {
 public:
  /// Throws std::invalid_argument unless n >= 2, 0 < gap <= 1, 1 <= best_arm <= n.
  BanditInstance(int arms, double gap, int best_arm);

  int arms() const noexcept { return arms_; }
  double gap() const noexcept { return gap_; }
  int best_arm() const noexcept { return best_arm_; }

  /// Mean reward of an arm. Throws std::out_of_range for arm outside 1..n.
  double reward_probability(int arm) const;

  friend bool operator==(const BanditInstance&, const BanditInstance&) = default;

 private:
  int arms_;
  double gap_;
  int best_arm_;
};

/// Draws the best arm uniformly from 1..n using the given stream.
BanditInstance make_instance(int arms, double gap, RngStream& rng);

/// One reward bit from `arm`.
bool sample_reward(const BanditInstance& instance, int arm, RngStream& rng);

struct ArmTally {
  int arm = 0;
  std::int64_t pulls = 0;
  std::int64_t displacement = 0;  // #ones - #zeros

  friend bool operator==(const ArmTally&, const ArmTally&) = default;
};

/// Per-arm pull counts s_i and reward-walk displacements c_i.
///
/// Stored sparsely: only arms that were pulled at least once have a tally,
/// kept in ascending arm order. Untouched arms read as (0, 0).
class SufficientStats {
 public:
  explicit SufficientStats(int arms);

  int arms() const noexcept { return arms_; }
  std::int64_t pulls(int arm) const;
  std::int64_t displacement(int arm) const;
  std::int64_t total_pulls() const noexcept { return total_pulls_; }

  std::span<const ArmTally> touched() const noexcept { return tallies_; }

  /// Accumulates one pull in place.
  void add(int arm, bool reward) { add_batch(arm, 1, reward ? 1 : 0); }
  /// Accumulates `pulls` pulls of which `ones` paid 1.
  void add_batch(int arm, std::int64_t pulls, std::int64_t ones);

  std::vector<std::int64_t> pulls_vector() const;
  std::vector<std::int64_t> displacement_vector() const;

  friend bool operator==(const SufficientStats& a, const SufficientStats& b) {
    return a.arms_ == b.arms_ && a.total_pulls_ == b.total_pulls_ && a.tallies_ == b.tallies_;
  }

 private:
  ArmTally& tally_for(int arm);
  const ArmTally* find(int arm) const;
  void check_arm(int arm) const;

  int arms_;
  std::int64_t total_pulls_ = 0;
  std::vector<ArmTally> tallies_;
  std::size_t last_ = 0;
};

/// Pure update: returns a copy of `stats` with one more pull recorded.
SufficientStats record_pull(SufficientStats stats, int arm, bool reward);

struct PullRecord {
  int arm = 0;
  bool reward = false;

  friend bool operator==(const PullRecord&, const PullRecord&) = default;
};

struct RunOutcome {
  int chosen_arm = 1;
  std::int64_t pulls_used = 0;
  SufficientStats stats{2};
  std::optional<std::vector<PullRecord>> log;

  friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

/// ceil(x) that ignores floating-point noise just above an integer, so that
/// e.g. 2000 * 0.1^2 counts as 20 rather than 21.
std::int64_t ceil_count(double x);
/// floor(x) with the same noise allowance just below an integer.
std::int64_t floor_count(double x);

}  // namespace banditlab
