#include <benchmark/benchmark.h>

#include "seedlab/nn/crf.hpp"
#include "seedlab/rng.hpp"

namespace {

using seedlab::Rng;
using seedlab::nn::Tensor;

struct CrfInput {
  Tensor emissions;
  Tensor transitions;
  std::vector<int> gold;
};

CrfInput make_input(std::size_t steps, std::size_t labels) {
  Rng rng(11);
  CrfInput in{Tensor(steps, labels), Tensor(labels + 2, labels + 2), {}};
  for (auto& v : in.emissions.values()) v = rng.uniform(-2.0, 2.0);
  for (auto& v : in.transitions.values()) v = rng.uniform(-1.0, 1.0);
  for (std::size_t t = 0; t < steps; ++t) in.gold.push_back(static_cast<int>(rng.below(labels)));
  return in;
}

void BM_CrfNll(benchmark::State& state) {
  const auto in = make_input(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(seedlab::nn::crf_nll(in.emissions, in.transitions, in.gold));
}
BENCHMARK(BM_CrfNll)->Args({20, 9})->Args({50, 9})->Args({50, 17});

void BM_CrfViterbi(benchmark::State& state) {
  const auto in = make_input(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(seedlab::nn::crf_viterbi(in.emissions, in.transitions));
}
BENCHMARK(BM_CrfViterbi)->Args({20, 9})->Args({50, 9})->Args({50, 17});

}  // namespace
