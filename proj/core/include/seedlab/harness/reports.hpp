#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seedlab/harness/experiments.hpp"
#include "seedlab/stats.hpp"

namespace seedlab::harness {

// ---- score summaries ------------------------------------------------------

struct SystemSummary {
  std::string name;
  stats::ScoreSummary summary;
};

// Columns: system, seed count, min, median, max (percent, 2 decimals), sigma (5 decimals).
std::string render_summary_table(std::span<const SystemSummary> systems);
// JSON list of {"name", "n", "min", "median", "max", "sd"} plus optional q1/q3/mean/p95.
std::vector<SystemSummary> load_summaries(const std::filesystem::path& path);

std::vector<double> final_test_scores(std::span<const tagger::RunRecord> runs);
std::vector<double> final_dev_scores(std::span<const tagger::RunRecord> runs);

// Spread between runs of one configuration: over all seed pairs |a - b|.
struct SeedSpread {
  std::size_t pairs = 0;
  double median = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};
SeedSpread seed_spread(std::span<const double> scores);

// Summary with quartiles, the pairwise spread and the dev/test rank correlation.
std::string render_seed_report(std::string_view name, std::span<const tagger::RunRecord> runs);

// ---- two-system comparison --------------------------------------------------

struct RandomizationSlot {
  bool available = false;
  std::string reason;  // why not, when unavailable
  std::uint64_t best_seed = 0;
  std::uint64_t worst_seed = 0;
  stats::TestResult test;
  std::uint64_t bonferroni_m = 0;
  double adjusted_p = 1.0;
};

struct ComparisonReport {
  SystemSummary a;
  SystemSummary b;
  stats::TestResult ks;
  std::optional<stats::TestResult> brown_forsythe;  // needs >= 2 runs per system
  std::optional<double> spearman_a;                 // dev vs test, needs varying scores
  std::optional<double> spearman_b;
  RandomizationSlot randomization_a;                // best vs worst run of each system
  RandomizationSlot randomization_b;
};

struct CompareOptions {
  std::uint64_t iterations = 10000;
  std::uint64_t seed = 1;
  // Bonferroni factor; 0 means the number of runs of the system.
  std::uint64_t bonferroni_m = 0;
};

ComparisonReport compare_systems(std::span<const tagger::RunRecord> runs_a,
                                 std::span<const tagger::RunRecord> runs_b,
                                 std::string name_a = "A", std::string name_b = "B",
                                 const CompareOptions& options = {});
std::string render_comparison(const ComparisonReport& report);

// Seed, dev and test per run after a "# key,value" block of summarize() fields.
std::string format_distribution(std::span<const tagger::RunRecord> runs);
void export_distribution(std::span<const tagger::RunRecord> runs, const std::filesystem::path& path);

// ---- axis tables --------------------------------------------------------------

struct AxisTableRow {
  std::string task;
  std::string metric;  // "F1" or "Acc."
  std::vector<std::string> options;
  std::size_t n_configs = 0;
  std::vector<double> win_percent;   // ties split evenly among the tied options
  std::size_t winner = 0;            // highest percentage, first on ties
  std::vector<std::optional<double>> delta;  // median(option - winner); empty for the winner
};

// scores[option][config].
AxisTableRow make_axis_row(std::string task, std::string metric, std::vector<std::string> options,
                           const std::vector<std::vector<double>>& scores);
AxisTableRow make_axis_row(std::string task, data::TaskKind kind, const PairedStudyResult& study);

// Pipe table in the published layout: a percentage row per task with the
// winner in **bold**, then a delta row; an average row when there are several
// tasks; finally one "a% / b%" summary line per task.
std::string render_axis_table(std::span<const AxisTableRow> rows);

// {"task", "metric", "options": [...], "scores": [[...], ...]} or a list of them.
std::vector<AxisTableRow> load_axis_fixture(const std::filesystem::path& path);

std::string format_percent(double fraction, int decimals);
// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace seedlab::harness
