#include "seedlab/rng.hpp"

#include <tuple>
#include <utility>

namespace seedlab {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) noexcept : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) noexcept {
  // Mix the stream id through splitmix first so that nearby (seed, stream)
  // pairs do not produce overlapping splitmix sequences.
  std::uint64_t sm = stream;
  const std::uint64_t salt = splitmix64(sm);
  Rng child(seed ^ salt);
  child.seed_ = seed;
  return child;
}

Rng Rng::split() noexcept {
  return Rng(next_u64());
}

std::uint64_t Rng::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

namespace {

// Full 128-bit product of two 64-bit values as (high, low).
std::pair<std::uint64_t, std::uint64_t> mul_wide(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t a_lo = a & 0xffffffffu, a_hi = a >> 32;
  const std::uint64_t b_lo = b & 0xffffffffu, b_hi = b >> 32;
  const std::uint64_t ll = a_lo * b_lo;
  const std::uint64_t lh = a_lo * b_hi;
  const std::uint64_t hl = a_hi * b_lo;
  const std::uint64_t hh = a_hi * b_hi;
  const std::uint64_t mid = (ll >> 32) + (lh & 0xffffffffu) + (hl & 0xffffffffu);
  const std::uint64_t high = hh + (lh >> 32) + (hl >> 32) + (mid >> 32);
  const std::uint64_t low = (mid << 32) | (ll & 0xffffffffu);
  return {high, low};
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  auto [high, low] = mul_wide(next_u64(), n);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) std::tie(high, low) = mul_wide(next_u64(), n);
  }
  return high;
}

}  // namespace seedlab
