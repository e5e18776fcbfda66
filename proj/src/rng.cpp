#include "banditlab/rng.hpp"

namespace banditlab {

RngStream::RngStream(std::uint64_t seed, std::uint64_t index) noexcept
    : seed_(seed), index_(index) {
  // Two rounds of the finalizer separate nearby keys before seeding.
  std::uint64_t sm = mix64(mix64(seed) ^ (index * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL));
  for (auto& word : state_) {
    sm += 0x9e3779b97f4a7c15ULL;
    word = mix64(sm);
  }
  // xoshiro must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t RngStream::uniform_index(std::uint64_t bound) noexcept {
  u128 product = static_cast<u128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t floor = (0 - bound) % bound;
    while (low < floor) {
      product = static_cast<u128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace banditlab
