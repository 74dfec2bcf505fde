#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace seedlab {

// splitmix64 step; used to expand seeds and derive child streams.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// xoshiro256** seeded through splitmix64.
//
// The stream for a given seed is identical on every platform: only integer
// arithmetic is used, and doubles are formed from the top 53 bits.
// Child streams come from derive(seed, stream) (stateless) or split()
// (consumes one draw from the parent).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept;

  static Rng derive(std::uint64_t seed, std::uint64_t stream) noexcept;
  Rng split() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  // Uniform in [0, 1).
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  // Uniform integer in [0, n); n must be positive. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
};

}  // namespace seedlab
