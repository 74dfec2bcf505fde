#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "seedlab/harness/config_space.hpp"
#include "seedlab/harness/results_store.hpp"
#include "seedlab/stats.hpp"

namespace seedlab::harness {

struct Datasets {
  const data::TaskData& task;
  const tagger::EmbeddingCatalog& catalog;
};

struct RunnerOptions {
  std::size_t threads = 1;
  bool keep_sentence_counts = false;
  // Called after each record is committed, in commit order.
  std::function<void(const tagger::RunRecord&, bool trained)> on_record;
};

// Runs `tasks` (config + axis option) on up to options.threads workers and
// commits finished records to the store strictly in task order. Keys already
// in the store are returned without retraining.
struct RunTask {
  tagger::NetworkConfig config;
  std::string axis_option;
};
std::vector<tagger::RunRecord> run_tasks(std::span<const RunTask> tasks, const Datasets& data,
                                         ResultsStore& store, const RunnerOptions& options = {});

// One record per seed, in the order given. Seeds must be distinct.
std::vector<tagger::RunRecord> run_seed_sweep(const tagger::NetworkConfig& config,
                                              std::span<const std::uint64_t> seeds,
                                              const Datasets& data, ResultsStore& store,
                                              const RunnerOptions& options = {});

struct OptionComparison {
  std::size_t a = 0;  // option indices
  std::size_t b = 0;
  stats::PairedComparison comparison;
};

struct PairedStudyResult {
  Axis axis = Axis::classifier;
  std::vector<std::string> options;
  // runs[option][config], trained with the config's seed.
  std::vector<std::vector<tagger::RunRecord>> runs;
  std::vector<OptionComparison> comparisons;  // every option pair, a < b
  // Over the per-option final test scores, groups in option order. Absent
  // when a group has fewer than two runs.
  std::optional<stats::TestResult> brown_forsythe;

  std::vector<std::vector<double>> test_scores() const;
};

// Option-major task order: every config with option 0, then option 1, ...
PairedStudyResult run_paired_study(const PairedStudy& study, const Datasets& data,
                                   ResultsStore& store, const RunnerOptions& options = {});

// Rebuilds a study result from stored records alone.
PairedStudyResult collect_paired_study(const PairedStudy& study, const ResultsStore& store);

}  // namespace seedlab::harness
