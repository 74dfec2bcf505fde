#include "seedlab/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "seedlab/error.hpp"

namespace seedlab::harness {

using tagger::NetworkConfig;
using tagger::RunRecord;

std::vector<RunRecord> run_tasks(std::span<const RunTask> tasks, const Datasets& data,
                                 ResultsStore& store, const RunnerOptions& options) {
  const std::size_t n = tasks.size();
  std::vector<std::optional<RunRecord>> done(n);
  std::vector<bool> trained(n, false);
  std::vector<RecordKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    tasks[i].config.validate();
    keys[i] = {tagger::config_hash(tasks[i].config), tasks[i].axis_option, tasks[i].config.seed};
  }

  std::mutex mutex;
  std::size_t next_commit = 0;
  std::exception_ptr failure;
  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> stop{false};

  // Called with the mutex held; commits the finished prefix in task order.
  auto commit_ready = [&] {
    while (next_commit < n && done[next_commit]) {
      if (trained[next_commit]) store.append(*done[next_commit]);
      if (options.on_record) options.on_record(*done[next_commit], trained[next_commit]);
      ++next_commit;
    }
  };

  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next_task++;
      if (i >= n) return;
      try {
        std::optional<RunRecord> record = store.find(keys[i]);
        const bool fresh = !record;
        if (fresh) {
          tagger::TrainOptions train_options;
          train_options.keep_sentence_counts = options.keep_sentence_counts;
          record = tagger::run_training(tasks[i].config, data.task, data.catalog, train_options);
          record->axis_option = tasks[i].axis_option;
        }
        std::lock_guard lock(mutex);
        done[i] = std::move(record);
        trained[i] = fresh;
        commit_ready();
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> out;
  out.reserve(n);
  for (auto& r : done) out.push_back(std::move(*r));
  return out;
}

std::vector<RunRecord> run_seed_sweep(const NetworkConfig& config, std::span<const std::uint64_t> seeds,
                                      const Datasets& data, ResultsStore& store,
                                      const RunnerOptions& options) {
  if (seeds.empty()) throw InvalidInput("a seed sweep needs at least one seed");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw InvalidInput("sweep seeds must be distinct");
  std::vector<RunTask> tasks;
  tasks.reserve(seeds.size());
  for (auto s : seeds) {
    RunTask t{config, ""};
    t.config.seed = s;
    tasks.push_back(std::move(t));
  }
  return run_tasks(tasks, data, store, options);
}

std::vector<std::vector<double>> PairedStudyResult::test_scores() const {
  std::vector<std::vector<double>> out;
  for (const auto& option_runs : runs) {
    auto& scores = out.emplace_back();
    for (const auto& r : option_runs) scores.push_back(r.final_test_score);
  }
  return out;
}

namespace {

std::vector<RunTask> study_tasks(const PairedStudy& study) {
  std::vector<RunTask> tasks;
  for (const auto& option : study.options) {
    for (const auto& base : study.base_configs) {
      RunTask t{base, axis_option_key(study.axis, option)};
      apply_option(study.axis, option, t.config);
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

PairedStudyResult analyse(const PairedStudy& study, std::vector<RunRecord> records) {
  PairedStudyResult result;
  result.axis = study.axis;
  result.options = study.options;
  const std::size_t configs = study.base_configs.size();
  for (std::size_t o = 0; o < study.options.size(); ++o)
    result.runs.emplace_back(std::make_move_iterator(records.begin() + o * configs),
                             std::make_move_iterator(records.begin() + (o + 1) * configs));
  const auto scores = result.test_scores();
  for (std::size_t a = 0; a < scores.size(); ++a)
    for (std::size_t b = a + 1; b < scores.size(); ++b)
      result.comparisons.push_back({a, b, stats::paired_comparison(scores[a], scores[b])});
  if (configs >= 2) result.brown_forsythe = stats::brown_forsythe(scores);
  return result;
}

}  // namespace

PairedStudyResult run_paired_study(const PairedStudy& study, const Datasets& data,
                                   ResultsStore& store, const RunnerOptions& options) {
  study.validate();
  const auto tasks = study_tasks(study);
  return analyse(study, run_tasks(tasks, data, store, options));
}

PairedStudyResult collect_paired_study(const PairedStudy& study, const ResultsStore& store) {
  study.validate();
  std::vector<RunRecord> records;
  for (const auto& t : study_tasks(study)) {
    auto r = store.find({tagger::config_hash(t.config), t.axis_option, t.config.seed});
    if (!r)
      throw InvalidInput("store lacks the run for " + t.axis_option + ", seed " +
                         std::to_string(t.config.seed));
    records.push_back(std::move(*r));
  }
  return analyse(study, std::move(records));
}

}  // namespace seedlab::harness
