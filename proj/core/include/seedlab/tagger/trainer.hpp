#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "seedlab/dataset.hpp"
#include "seedlab/scorer.hpp"
#include "seedlab/tagger/config.hpp"
#include "seedlab/tagger/model.hpp"

namespace seedlab::tagger {

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string axis_option;  // "" for plain runs, "<axis>=<option>" inside paired studies
  NetworkConfig config;
  std::vector<double> dev_scores;   // one per completed epoch
  std::vector<double> test_scores;
  std::size_t best_dev_epoch = 0;   // 1-based; 0 when no epoch completed
  double final_dev_score = 0.0;
  double final_test_score = 0.0;    // test score at best_dev_epoch
  std::size_t epochs_to_best = 0;
  std::size_t epochs_run = 0;
  bool diverged = false;
  double wall_time_seconds = 0.0;
  // Per-sentence test counts of the selected epoch, kept on request.
  std::vector<score::MatchCounts> test_sentence_counts;
};

struct TrainOptions {
  bool keep_sentence_counts = false;
  std::filesystem::path checkpoint;  // written with the selected parameters when non-empty
  std::function<void(std::size_t epoch, double dev, double test)> on_epoch;
};

struct EvalResult {
  double score = 0.0;
  std::vector<score::MatchCounts> sentence_counts;
};

// Accuracy for token tasks, micro segment F1 for span tasks. Gold tags must
// already be in the model's scheme.
EvalResult evaluate(const TaggerModel& model, const data::Corpus& gold, data::TaskKind kind);

// Mini-batch training with dev-based model selection. Corpora are converted
// to the configured scheme first. The best-dev parameters are restored into
// the model before returning.
RunRecord train(TaggerModel& model, const data::Corpus& train_set, const data::Corpus& dev_set,
                const data::Corpus& test_set, data::TaskKind kind, const TrainOptions& options = {});

// build_model + train on the task's splits.
RunRecord run_training(const NetworkConfig& config, const data::TaskData& task,
                       const EmbeddingCatalog& catalog, const TrainOptions& options = {});

}  // namespace seedlab::tagger
