#pragma once

#include <array>
#include <cstdint>

namespace banditlab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Threshold for a 53-bit Bernoulli draw: P(true) = floor(p * 2^53) / 2^53.
/// p <= 0 never fires, p >= 1 always fires.
constexpr std::uint64_t bernoulli_threshold(double p) noexcept {
  constexpr double two53 = 9007199254740992.0;
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return std::uint64_t{1} << 53;
  return static_cast<std::uint64_t>(p * two53);
}

/// Reproducible random stream keyed by (master seed, stream index).
///
/// The key is hashed into a xoshiro256** state through SplitMix64, so every
/// (seed, index) pair owns an independent sequence and the same pair yields
/// the same sequence on any platform. Only integer arithmetic is used to turn
/// raw words into draws; no std:: distribution is involved.
///
/// A stream is owned by exactly one trial and is not thread-safe.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// One Bernoulli draw against a precomputed bernoulli_threshold().
  bool bernoulli_with(std::uint64_t threshold) noexcept {
    return (next_u64() >> 11) < threshold;
  }

  bool bernoulli(double p) noexcept { return bernoulli_with(bernoulli_threshold(p)); }

  /// Uniform integer in [0, bound). bound must be positive.
  /// Lemire's multiply-shift with rejection; unbiased.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t index_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace banditlab
