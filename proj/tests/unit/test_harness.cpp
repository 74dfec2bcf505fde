#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seedlab/error.hpp"
#include "seedlab/harness.hpp"

using namespace seedlab;
using namespace seedlab::harness;
using tagger::RunRecord;

namespace {

const data::TaskData& small_task() {
  static const data::TaskData task = [] {
    data::TaskSpec s;
    s.vocab_size = 400;
    s.lexicon_size = 60;
    s.train_size = 40;
    s.dev_size = 15;
    s.test_size = 15;
    s.seed = 5;
    return data::generate(s);
  }();
  return task;
}

tagger::NetworkConfig tiny_config() {
  tagger::NetworkConfig c;
  c.embedding_dim = 8;
  c.units = {4};
  c.batch_size = 8;
  c.max_epochs = 2;
  c.patience = 0;
  return c;
}

RunRecord fake_record(std::uint64_t seed, double test) {
  RunRecord r;
  r.config = tiny_config();
  r.config.seed = seed;
  r.config_hash = tagger::config_hash(r.config);
  r.seed = seed;
  r.dev_scores = {0.5, test};
  r.test_scores = {0.4, test};
  r.best_dev_epoch = 2;
  r.final_dev_score = test;
  r.final_test_score = test;
  r.epochs_to_best = 2;
  r.epochs_run = 2;
  return r;
}

std::filesystem::path fresh_path(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("seedlab_harness_" + name);
  std::filesystem::remove(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SEEDLAB_FIXTURE_DIR) / name;
}

}  // namespace

// ---- configuration space -------------------------------------------------------

TEST(ConfigSpace, SamplingIsDeterministicAndValid) {
  const auto space = ConfigSpace::design_space();
  const auto a = sample_configs(space, 50, 9);
  const auto b = sample_configs(space, 50, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_configs(space, 50, 10));
  for (const auto& c : a) {
    EXPECT_NO_THROW(c.validate());
    EXPECT_TRUE(c.in_design_space());
  }
  EXPECT_THROW(sample_configs(space, 0, 1), InvalidInput);
}

TEST(ConfigSpace, ClassifierFrequencyIsUniform) {
  const auto configs = sample_configs(ConfigSpace::design_space(), 1000, 4);
  std::size_t crf = 0;
  std::map<std::size_t, std::size_t> layers;
  for (const auto& c : configs) {
    crf += c.classifier == tagger::Classifier::crf;
    ++layers[c.layers()];
  }
  EXPECT_NEAR(static_cast<double>(crf) / 1000.0, 0.5, 0.05);
  for (const auto& [n, count] : layers) EXPECT_NEAR(static_cast<double>(count) / 1000.0, 1.0 / 3.0, 0.05) << n;
}

TEST(ConfigSpace, EmptyAxisRejected) {
  auto space = ConfigSpace::design_space();
  space.optimizer.clear();
  EXPECT_THROW(space.validate(), ConfigError);
  EXPECT_THROW(sample_configs(space, 3, 1), ConfigError);
}

TEST(ConfigSpace, AxisOptionsRoundTrip) {
  const auto space = ConfigSpace::design_space();
  for (auto axis : {Axis::char_rep, Axis::classifier, Axis::optimizer, Axis::dropout,
                    Axis::grad_treatment, Axis::scheme, Axis::layers, Axis::batch_size,
                    Axis::embedding_quality}) {
    EXPECT_EQ(parse_axis(axis_name(axis)), axis);
    const auto options = axis_options(space, axis);
    EXPECT_GE(options.size(), 2u) << axis_name(axis);
    std::set<std::string> hashes;
    for (const auto& o : options) {
      auto c = tiny_config();
      apply_option(axis, o, c);
      EXPECT_NO_THROW(c.validate()) << o;
      hashes.insert(tagger::config_hash(c));
    }
    // Every option yields a distinct configuration.
    EXPECT_EQ(hashes.size(), options.size()) << axis_name(axis);
  }
  auto c = tiny_config();
  apply_option(Axis::dropout, "naive:0.5", c);
  EXPECT_EQ(c.dropout, nn::DropoutMode::naive);
  EXPECT_EQ(c.dropout_rate, 0.5);
  apply_option(Axis::grad_treatment, "clip:5", c);
  EXPECT_EQ(c.grad_treatment, (tagger::GradTreatment{tagger::GradTreatmentKind::clip, 5.0}));
  c.units = {50, 75};
  apply_option(Axis::layers, "3", c);
  EXPECT_EQ(c.units, (std::vector<std::size_t>{50, 75, 75}));
  apply_option(Axis::layers, "1", c);
  EXPECT_EQ(c.units, (std::vector<std::size_t>{50}));
  EXPECT_THROW(apply_option(Axis::classifier, "svm", c), ConfigError);
  EXPECT_THROW(apply_option(Axis::dropout, "naive:abc", c), ConfigError);
  EXPECT_EQ(axis_option_key(Axis::classifier, "crf"), "classifier=crf");
}

TEST(ConfigSpace, PairedStudySharesSeedAndValidates) {
  const auto study =
      make_paired_study(ConfigSpace::design_space(), Axis::classifier, {"softmax", "crf"}, 20, 3);
  EXPECT_EQ(study.base_configs.size(), 20u);
  EXPECT_NO_THROW(study.validate());
  std::set<std::uint64_t> seeds;
  for (const auto& c : study.base_configs) seeds.insert(c.seed);
  EXPECT_GT(seeds.size(), 15u);
  PairedStudy bad = study;
  bad.options = {"crf", "crf"};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.options = {"crf"};
  EXPECT_THROW(bad.validate(), ConfigError);
}

// ---- results store ---------------------------------------------------------------

TEST(Store, SerializeRoundTrip) {
  auto r = fake_record(3, 0.75);
  r.axis_option = "classifier=crf";
  r.test_sentence_counts = {{1, 0, 2}, {3, 1, 0}};
  r.wall_time_seconds = 1.5;
  const auto line = serialize_record(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(line.find("wall"), std::string::npos);
  EXPECT_NE(line.find("\"v\":1"), std::string::npos);
  auto back = parse_record(line);
  EXPECT_EQ(serialize_record(back), line);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.test_sentence_counts, r.test_sentence_counts);
  EXPECT_EQ(back.dev_scores, r.dev_scores);
  const auto timed = serialize_record(r, true);
  EXPECT_NE(timed.find("wall"), std::string::npos);
  EXPECT_EQ(parse_record(timed).wall_time_seconds, 1.5);
}

TEST(Store, AppendSemantics) {
  const auto path = fresh_path("append.jsonl");
  ResultsStore store(path);
  EXPECT_TRUE(store.append(fake_record(1, 0.7)));
  EXPECT_TRUE(store.append(fake_record(2, 0.8)));
  EXPECT_FALSE(store.append(fake_record(1, 0.7)));
  EXPECT_THROW(store.append(fake_record(1, 0.71)), IntegrityError);
  EXPECT_EQ(store.size(), 2u);
  const auto key = key_of(fake_record(2, 0.8));
  ASSERT_TRUE(store.find(key).has_value());
  EXPECT_EQ(store.find(key)->final_test_score, 0.8);
  EXPECT_EQ(store.select(key.config_hash).size(), 2u);
  EXPECT_TRUE(store.select(key.config_hash, "classifier=crf").empty());

  const auto bytes = slurp(path);
  ResultsStore reopened(path);
  EXPECT_EQ(reopened.size(), 2u);
  EXPECT_TRUE(reopened.contains(key));
  EXPECT_FALSE(reopened.append(fake_record(2, 0.8)));
  EXPECT_EQ(slurp(path), bytes);
  std::filesystem::remove(path);
}

TEST(Store, CorruptFilesRaiseIntegrityError) {
  const auto path = fresh_path("corrupt.jsonl");
  {
    std::ofstream os(path);
    os << serialize_record(fake_record(1, 0.7)) << "\n{broken\n";
  }
  try {
    ResultsStore s(path);
    FAIL();
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  {
    std::ofstream os(path);
    os << serialize_record(fake_record(1, 0.7)) << "\n" << serialize_record(fake_record(1, 0.6)) << "\n";
  }
  EXPECT_THROW(ResultsStore{path}, IntegrityError);
  std::filesystem::remove(path);
}

TEST(Store, InMemoryStoreWritesNothing) {
  ResultsStore store;
  EXPECT_TRUE(store.append(fake_record(1, 0.7)));
  EXPECT_TRUE(store.path().empty());
  EXPECT_EQ(store.records().size(), 1u);
}

// ---- experiments -----------------------------------------------------------------

TEST(Experiments, SeedSweepIsResumableAndReplayable) {
  tagger::EmbeddingCatalog catalog(&small_task());
  const Datasets data{small_task(), catalog};
  const auto path = fresh_path("sweep.jsonl");
  const auto cfg = tiny_config();
  const std::vector<std::uint64_t> first = {1, 2};
  const std::vector<std::uint64_t> all = {1, 2, 3};
  {
    ResultsStore store(path);
    EXPECT_EQ(run_seed_sweep(cfg, first, data, store).size(), 2u);
  }
  std::size_t trained = 0;
  RunnerOptions opts;
  opts.threads = 2;
  opts.on_record = [&](const RunRecord&, bool t) { trained += t; };
  std::string after;
  {
    ResultsStore store(path);
    const auto records = run_seed_sweep(cfg, all, data, store, opts);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[2].seed, 3u);
    EXPECT_EQ(trained, 1u);
    after = slurp(path);
  }
  {
    ResultsStore store(path);
    trained = 0;
    run_seed_sweep(cfg, all, data, store, opts);
    EXPECT_EQ(trained, 0u);
    EXPECT_EQ(slurp(path), after);
  }
  // A fresh store with a different thread count produces the same bytes.
  const auto path2 = fresh_path("sweep2.jsonl");
  {
    ResultsStore store(path2);
    RunnerOptions three;
    three.threads = 3;
    run_seed_sweep(cfg, all, data, store, three);
  }
  EXPECT_EQ(slurp(path2), after);
  const std::vector<std::uint64_t> dup = {4, 4};
  ResultsStore mem;
  EXPECT_THROW(run_seed_sweep(cfg, dup, data, mem), InvalidInput);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST(Experiments, PairedStudyCountsAndReplay) {
  tagger::EmbeddingCatalog catalog(&small_task());
  const Datasets data{small_task(), catalog};
  auto space = ConfigSpace::design_space();
  space.base = tiny_config();
  space.layers = {1};
  space.units = {25};
  space.batch_size = {16, 32};
  space.char_rep = {tagger::CharRep::none};
  auto study = make_paired_study(space, Axis::classifier, {"softmax", "crf"}, 4, 2);
  for (auto& c : study.base_configs) c.embedding_dim = 8;

  ResultsStore store;
  const auto result = run_paired_study(study, data, store);
  EXPECT_EQ(store.size(), 8u);
  ASSERT_EQ(result.runs.size(), 2u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& s = result.runs[0][i];
    const auto& c = result.runs[1][i];
    EXPECT_EQ(s.seed, c.seed);
    EXPECT_EQ(s.config.classifier, tagger::Classifier::softmax);
    EXPECT_EQ(c.config.classifier, tagger::Classifier::crf);
    EXPECT_EQ(s.axis_option, "classifier=softmax");
    EXPECT_EQ(c.axis_option, "classifier=crf");
  }
  ASSERT_EQ(result.comparisons.size(), 1u);
  const auto& cmp = result.comparisons[0].comparison;
  EXPECT_NEAR(cmp.win_rate_a + cmp.win_rate_b + cmp.tie_rate, 1.0, 1e-12);
  ASSERT_TRUE(result.brown_forsythe.has_value());
  const auto groups = result.test_scores();
  EXPECT_EQ(result.brown_forsythe->statistic, stats::brown_forsythe(groups).statistic);

  const auto again = collect_paired_study(study, store);
  EXPECT_EQ(again.test_scores(), groups);
  const auto row = make_axis_row("NER", data::TaskKind::span_task, again);
  const std::vector<AxisTableRow> rows = {row};
  EXPECT_NE(render_axis_table(rows).find("| NER | 4 |"), std::string::npos);
}

// ---- reports -------------------------------------------------------------------

TEST(Reports, SummaryFixtureRendersPublishedValues) {
  const auto systems = load_summaries(fixture("published_summaries.json"));
  ASSERT_EQ(systems.size(), 2u);
  const auto table = render_summary_table(systems);
  EXPECT_NE(table.find("| BiLSTM-CNN-CRF | 86 | 89.99% | 90.64% | 91.00% | 0.00241 |"), std::string::npos)
      << table;
  EXPECT_NE(table.find("| BiLSTM-LSTM-CRF | 41 | 90.19% | 90.81% | 91.14% | 0.00176 |"), std::string::npos)
      << table;
}

TEST(Reports, AxisFixtureRendersPublishedValues) {
  const auto rows = load_axis_fixture(fixture("classifier_axis_ner.json"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_configs, 232u);
  EXPECT_EQ(rows[0].winner, 1u);
  const auto table = render_axis_table(rows);
  EXPECT_NE(table.find("| NER | 232 | 9.5% | **90.5%** |"), std::string::npos) << table;
  EXPECT_NE(table.find("| ΔF1 | | -0.66% | |"), std::string::npos) << table;
  EXPECT_NE(table.find("9.5% / 90.5%"), std::string::npos);
}

TEST(Reports, AllTieFixture) {
  const std::vector<double> s = {0.8, 0.9, 0.7};
  const auto row = make_axis_row("POS", "Acc.", {"A", "B"}, {s, s});
  EXPECT_EQ(row.win_percent, (std::vector<double>{50.0, 50.0}));
  EXPECT_EQ(row.winner, 0u);
  ASSERT_TRUE(row.delta[1].has_value());
  EXPECT_EQ(*row.delta[1], 0.0);
  const std::vector<AxisTableRow> rows = {row};
  const auto table = render_axis_table(rows);
  EXPECT_NE(table.find("| POS | 3 | **50.0%** | 50.0% |"), std::string::npos) << table;
  EXPECT_NE(table.find("| ΔAcc. | | | 0.00% |"), std::string::npos) << table;
}

TEST(Reports, DeltaSignFollowsDominantOption) {
  // Option B beats A on 8 of 10 configurations by a varying margin.
  std::vector<double> a, b;
  for (int i = 0; i < 10; ++i) {
    a.push_back(0.8 + 0.01 * i);
    b.push_back(a.back() + (i < 8 ? 0.002 * (i + 1) : -0.001));
  }
  const auto row = make_axis_row("Chunking", "F1", {"A", "B"}, {a, b});
  EXPECT_EQ(row.winner, 1u);
  EXPECT_DOUBLE_EQ(row.win_percent[1], 80.0);
  ASSERT_TRUE(row.delta[0].has_value());
  EXPECT_LT(*row.delta[0], 0.0);
  EXPECT_FALSE(row.delta[1].has_value());
}

TEST(ReportsProperty, RowPercentagesSumToHundred) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(3);
    const std::size_t n = 1 + rng.below(40);
    std::vector<std::vector<double>> scores(k, std::vector<double>(n));
    for (auto& o : scores)
      for (auto& v : o) v = static_cast<double>(rng.below(4)) / 10.0;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) names.push_back("o" + std::to_string(i));
    const auto row = make_axis_row("T", "F1", names, scores);
    double total = 0.0;
    for (double p : row.win_percent) total += p;
    ASSERT_NEAR(total, 100.0, 1e-9);
  }
}

TEST(Reports, MultiTaskTableHasAverage) {
  const std::vector<double> lo = {0.1, 0.2}, hi = {0.3, 0.4};
  const std::vector<AxisTableRow> rows = {make_axis_row("NER", "F1", {"A", "B"}, {lo, hi}),
                                          make_axis_row("POS", "Acc.", {"A", "B"}, {hi, lo})};
  const auto table = render_axis_table(rows);
  EXPECT_NE(table.find("| Average | | **50.0%** | 50.0% |"), std::string::npos) << table;
}

TEST(Reports, DistributionCsv) {
  std::vector<RunRecord> runs;
  for (std::uint64_t s = 1; s <= 5; ++s) runs.push_back(fake_record(s, 0.80 + 0.01 * static_cast<double>(s)));
  const auto csv = format_distribution(runs);
  EXPECT_EQ(csv, format_distribution(runs));
  const auto summary = stats::summarize(final_test_scores(runs));
  EXPECT_NE(csv.find("# n,5\n"), std::string::npos);
  EXPECT_NE(csv.find("# q1," + format_double(summary.q1) + "\n"), std::string::npos);
  EXPECT_NE(csv.find("# median," + format_double(summary.median) + "\n"), std::string::npos);
  EXPECT_NE(csv.find("# q3," + format_double(summary.q3) + "\n"), std::string::npos);
  const auto header = csv.find("seed,dev,test\n");
  ASSERT_NE(header, std::string::npos);
  std::size_t rows = 0;
  for (std::size_t i = header; i < csv.size(); ++i) rows += csv[i] == '\n';
  EXPECT_EQ(rows, 6u);
  const auto path = fresh_path("dist.csv");
  export_distribution(runs, path);
  EXPECT_EQ(slurp(path), csv);
  std::filesystem::remove(path);
  EXPECT_THROW(export_distribution(runs, fresh_path("nodir") / "a" / "b.csv"), IoError);
  EXPECT_THROW(format_distribution(std::vector<RunRecord>{}), InvalidInput);
}

TEST(Reports, FormatHelpers) {
  EXPECT_EQ(format_percent(-0.0066, 2), "-0.66%");
  EXPECT_EQ(format_percent(0.0, 2), "0.00%");
  EXPECT_EQ(format_percent(-0.0, 2), "0.00%");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Reports, CompareIdenticalAndDisjointSystems) {
  std::vector<RunRecord> a, b;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    a.push_back(fake_record(s, 0.80 + 0.001 * static_cast<double>(s)));
    b.push_back(fake_record(s + 10, 0.90 + 0.001 * static_cast<double>(s)));
  }
  const auto same = compare_systems(a, a);
  EXPECT_EQ(same.ks.statistic, 0.0);
  EXPECT_EQ(same.ks.p_value, 1.0);
  EXPECT_EQ(same.a.summary.median, same.b.summary.median);
  const auto diff = compare_systems(a, b, "low", "high");
  EXPECT_EQ(diff.ks.statistic, 1.0);
  EXPECT_TRUE(diff.brown_forsythe.has_value());
  EXPECT_FALSE(diff.randomization_a.available);
  const auto text = render_comparison(diff);
  EXPECT_NE(text.find("low"), std::string::npos);
  EXPECT_NE(text.find("unavailable"), std::string::npos) << text;
  EXPECT_THROW(compare_systems(a, std::vector<RunRecord>{}), InvalidInput);
}

TEST(Reports, RandomizationSlotReportsBonferroniFactor) {
  std::vector<RunRecord> a;
  for (std::uint64_t s = 1; s <= 4; ++s) {
    auto r = fake_record(s, 0.0);
    r.test_sentence_counts = {{s, 1, 1}, {2, s % 2, 1}, {1, 0, s % 3}};
    r.final_test_score = score::corpus_prf(r.test_sentence_counts).f1;
    r.test_scores.back() = r.final_test_score;
    a.push_back(r);
  }
  const auto rep = compare_systems(a, a);
  ASSERT_TRUE(rep.randomization_a.available);
  EXPECT_EQ(rep.randomization_a.bonferroni_m, 4u);
  EXPECT_EQ(rep.randomization_a.adjusted_p,
            stats::bonferroni(rep.randomization_a.test.p_value, 4));
  EXPECT_NE(rep.randomization_a.best_seed, rep.randomization_a.worst_seed);
  const auto text = render_comparison(rep);
  EXPECT_NE(text.find("Bonferroni"), std::string::npos) << text;
  CompareOptions opts;
  opts.bonferroni_m = 6;
  EXPECT_EQ(compare_systems(a, a, "A", "B", opts).randomization_b.bonferroni_m, 6u);
}

TEST(Reports, SeedReportMentionsQuartiles) {
  std::vector<RunRecord> runs;
  for (std::uint64_t s = 1; s <= 5; ++s) runs.push_back(fake_record(s, 0.80 + 0.003 * static_cast<double>(s)));
  const auto text = render_seed_report("sys", runs);
  for (const char* key : {"Min", "Median", "Max", "Q1", "Q3"})
    EXPECT_NE(text.find(key), std::string::npos) << key << "\n" << text;
  const auto spread = seed_spread(final_test_scores(runs));
  EXPECT_EQ(spread.pairs, 10u);
  EXPECT_NEAR(spread.max, 0.012, 1e-12);
}
