#include <benchmark/benchmark.h>

#include "seedlab/nn/lstm.hpp"
#include "seedlab/rng.hpp"

namespace {

using seedlab::Rng;
using seedlab::nn::Tensor;

Tensor random_input(std::size_t steps, std::size_t dim) {
  Rng rng(3);
  Tensor x(steps, dim);
  for (auto& v : x.values()) v = rng.uniform(-1.0, 1.0);
  return x;
}

void BM_BiLstmForward(benchmark::State& state) {
  Rng init(1);
  const auto units = static_cast<std::size_t>(state.range(0));
  const auto stack = seedlab::nn::make_bilstm_stack("b", 50, {units}, seedlab::nn::DropoutMode::none, 0.0, init);
  const auto x = random_input(25, 50);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(seedlab::nn::bilstm_forward(stack, x, false, rng, nullptr));
}
BENCHMARK(BM_BiLstmForward)->Arg(25)->Arg(100);

void BM_BiLstmForwardBackward(benchmark::State& state) {
  Rng init(1);
  const auto units = static_cast<std::size_t>(state.range(0));
  auto stack = seedlab::nn::make_bilstm_stack("b", 50, {units}, seedlab::nn::DropoutMode::variational, 0.25, init);
  const auto x = random_input(25, 50);
  const Tensor d_out(25, 2 * units, 1.0);
  Rng rng(2);
  for (auto _ : state) {
    seedlab::nn::BiLstmTrace trace;
    seedlab::nn::bilstm_forward(stack, x, true, rng, &trace);
    benchmark::DoNotOptimize(seedlab::nn::bilstm_backward(stack, trace, d_out));
  }
}
BENCHMARK(BM_BiLstmForwardBackward)->Arg(25)->Arg(100);

}  // namespace
