#include <benchmark/benchmark.h>

#include "seedlab/dataset.hpp"
#include "seedlab/tagger.hpp"

namespace {

using namespace seedlab;

// One epoch over the standard task's training split.
void BM_TrainingEpoch(benchmark::State& state) {
  const auto task = data::generate(data::TaskSpec::standard_span_task());
  const tagger::EmbeddingCatalog catalog(&task);
  tagger::NetworkConfig config;
  config.embedding_dim = 32;
  config.units = {static_cast<std::size_t>(state.range(0))};
  config.max_epochs = 1;
  config.patience = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tagger::run_training(config, task, catalog));
}
BENCHMARK(BM_TrainingEpoch)->Arg(50)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
