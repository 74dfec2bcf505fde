#include <benchmark/benchmark.h>

#include "seedlab/rng.hpp"
#include "seedlab/stats.hpp"

namespace {

using seedlab::score::MatchCounts;

std::vector<MatchCounts> counts(std::size_t n, std::uint64_t seed) {
  seedlab::Rng rng(seed);
  std::vector<MatchCounts> out(n);
  for (auto& c : out) c = {rng.below(6), rng.below(3), rng.below(3)};
  return out;
}

void BM_ApproxRandomization(benchmark::State& state) {
  const auto a = counts(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = counts(a.size(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(seedlab::stats::approx_randomization_test(a, b, 10000, 3));
}
BENCHMARK(BM_ApproxRandomization)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ExactRandomization(benchmark::State& state) {
  const auto a = counts(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = counts(a.size(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(seedlab::stats::exact_randomization_test(a, b));
}
BENCHMARK(BM_ExactRandomization)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
