// seedlab command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "seedlab/dataset.hpp"
#include "seedlab/error.hpp"
#include "seedlab/harness.hpp"
#include "seedlab/tagger.hpp"

namespace fs = std::filesystem;
using namespace seedlab;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string store;
  std::size_t threads = 1;
};

struct DataOptions {
  std::string dir;
  std::string kind = "span_task";
  std::uint64_t task_seed = 13;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--data", d.dir, "Directory with train/dev/test.conll (default: the standard synthetic task)");
  cmd->add_option("--kind", d.kind, "Task kind of --data: span_task or token_task");
  cmd->add_option("--task-seed", d.task_seed, "Seed of the generated standard task");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty())
    std::cout << text << std::flush;
  else
    write_text(g.out, text);
}

// Task data plus the catalog that resolves embedding sources against it.
struct Workspace {
  data::TaskData task;
  std::unique_ptr<tagger::EmbeddingCatalog> catalog;
};

std::unique_ptr<Workspace> load_workspace(const DataOptions& d) {
  auto ws = std::make_unique<Workspace>();
  if (d.dir.empty()) {
    auto spec = data::TaskSpec::standard_span_task();
    spec.seed = d.task_seed;
    ws->task = data::generate(spec);
    ws->catalog = std::make_unique<tagger::EmbeddingCatalog>(&ws->task);
    return ws;
  }
  const fs::path dir(d.dir);
  data::ConllOptions options;
  ws->task.spec.kind = data::parse_task_kind(d.kind);
  if (ws->task.spec.kind == data::TaskKind::token_task) options.scheme.reset();
  ws->task.train = data::read_conll(dir / "train.conll", options);
  ws->task.dev = data::read_conll(dir / "dev.conll", options);
  ws->task.test = data::read_conll(dir / "test.conll", options);
  ws->catalog = std::make_unique<tagger::EmbeddingCatalog>(nullptr);
  for (const char* quality : {"informative", "random"}) {
    const fs::path file = dir / (std::string("embeddings.") + quality + ".txt");
    if (fs::exists(file))
      ws->catalog->add(std::string("synthetic:") + quality, data::read_embeddings(file));
  }
  return ws;
}

tagger::NetworkConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return tagger::config_from_json(read_text(path));
}

std::vector<tagger::RunRecord> select_config(const harness::ResultsStore& store,
                                             const std::string& hash_or_prefix) {
  std::vector<std::string> matches;
  for (const auto& r : store.records())
    if (r.axis_option.empty() && r.config_hash.starts_with(hash_or_prefix) &&
        std::find(matches.begin(), matches.end(), r.config_hash) == matches.end())
      matches.push_back(r.config_hash);
  if (matches.empty()) throw InvalidInput("no seed-sweep runs for config '" + hash_or_prefix + "'");
  if (matches.size() > 1) throw InvalidInput("config prefix '" + hash_or_prefix + "' is ambiguous");
  return store.select(matches.front());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

harness::RunnerOptions runner_options(const Globals& g, bool keep_counts) {
  harness::RunnerOptions o;
  o.threads = g.threads;
  o.keep_sentence_counts = keep_counts;
  o.on_record = [](const tagger::RunRecord& r, bool trained) {
    const std::string option = r.axis_option.empty() ? "" : " " + r.axis_option;
    std::fprintf(stderr, "%s%s seed %llu: test %.4f (best epoch %zu%s)\n", r.config_hash.c_str(),
                 option.c_str(), static_cast<unsigned long long>(r.seed), r.final_test_score,
                 r.best_dev_epoch, trained ? "" : ", stored");
  };
  return o;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IntegrityError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seedlab: seed-variance laboratory for BiLSTM sequence taggers"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (run seed, sampling seed or task seed)");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--store", g.store, "Results store (JSON lines)");
  app.add_option("--threads", g.threads, "Concurrent training runs")->check(CLI::PositiveNumber);
  app.fallthrough();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic task as CoNLL files plus embeddings");
  data::TaskSpec gen_spec = data::TaskSpec::standard_span_task();
  std::string gen_kind = "span_task";
  std::size_t gen_dim = 50;
  gen->add_option("--kind", gen_kind, "span_task or token_task");
  gen->add_option("--vocab", gen_spec.vocab_size, "Vocabulary size");
  gen->add_option("--lexicon", gen_spec.lexicon_size, "Entity lexicon size");
  gen->add_option("--noise", gen_spec.noise_rate, "Fraction of ambiguous tokens");
  gen->add_option("--avg-length", gen_spec.avg_sentence_length, "Mean sentence length");
  gen->add_option("--train", gen_spec.train_size, "Training sentences");
  gen->add_option("--dev", gen_spec.dev_size, "Development sentences");
  gen->add_option("--test", gen_spec.test_size, "Test sentences");
  gen->add_option("--embedding-dim", gen_dim, "Dimension of the written embeddings");

  // train
  auto* train = app.add_subcommand("train", "Train one configuration and print its run record");
  std::string train_config;
  std::string train_checkpoint;
  bool train_counts = false;
  DataOptions train_data;
  train->add_option("--config", train_config, "NetworkConfig JSON (missing fields take defaults)");
  train->add_option("--checkpoint", train_checkpoint, "Write the selected parameters here");
  train->add_flag("--keep-counts", train_counts, "Store per-sentence test counts");
  add_data_options(train, train_data);

  // sweep-seeds
  auto* sweep = app.add_subcommand("sweep-seeds", "Train one configuration under many seeds");
  std::string sweep_config;
  std::size_t sweep_n = 20;
  bool sweep_counts = false;
  DataOptions sweep_data;
  sweep->add_option("--config", sweep_config, "NetworkConfig JSON");
  sweep->add_option("--seeds", sweep_n, "Number of seeds; they run from --seed (default 1) upwards");
  sweep->add_flag("--keep-counts", sweep_counts, "Store per-sentence test counts");
  add_data_options(sweep, sweep_data);

  // sweep-configs
  auto* study = app.add_subcommand("sweep-configs", "Paired study over sampled configurations");
  std::string study_axis = "classifier";
  std::string study_options;
  std::string study_base;
  std::string study_task = "synthetic";
  std::size_t study_n = 20;
  DataOptions study_data;
  study->add_option("--axis", study_axis, "Varied design choice");
  study->add_option("--options", study_options, "Comma-separated options (default: the whole axis)");
  study->add_option("--configs", study_n, "Number of sampled configurations");
  study->add_option("--base", study_base, "NetworkConfig JSON for fields outside the design axes");
  study->add_option("--task-name", study_task, "Row label of the rendered table");
  add_data_options(study, study_data);

  // compare
  auto* compare = app.add_subcommand("compare", "Compare two seed sweeps, or render stored summaries");
  std::string cmp_summaries;
  std::string cmp_a;
  std::string cmp_b;
  std::string cmp_name_a = "A";
  std::string cmp_name_b = "B";
  harness::CompareOptions cmp_options;
  compare->add_option("--summaries", cmp_summaries, "JSON summary fixture to render");
  compare->add_option("--a", cmp_a, "Config hash (or prefix) of system A");
  compare->add_option("--b", cmp_b, "Config hash (or prefix) of system B");
  compare->add_option("--name-a", cmp_name_a, "Label of system A in the report");
  compare->add_option("--name-b", cmp_name_b, "Label of system B in the report");
  compare->add_option("--iterations", cmp_options.iterations, "Randomization-test iterations");
  compare->add_option("--bonferroni", cmp_options.bonferroni_m, "Bonferroni factor (default: runs per system)");

  // report
  auto* report = app.add_subcommand("report", "Seed-sweep report from the store, or an axis-table fixture");
  std::string report_hash;
  std::string report_fixture;
  report->add_option("--config-hash", report_hash, "Config hash or prefix (default: every sweep in the store)");
  report->add_option("--axis-fixture", report_fixture, "Render an axis-table fixture instead");

  // export-violin
  auto* violin = app.add_subcommand("export-violin", "Write a seed sweep's score distribution as CSV");
  std::string violin_hash;
  violin->add_option("--config-hash", violin_hash, "Config hash or prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      gen_spec.kind = data::parse_task_kind(gen_kind);
      if (g.seed) gen_spec.seed = *g.seed;
      if (gen_spec.kind == data::TaskKind::token_task) gen_spec.label_types = {"DET", "NOUN", "VERB", "ADJ", "ADP"};
      const auto task = data::generate(gen_spec);
      const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
      fs::create_directories(dir);
      data::write_conll(task.train, dir / "train.conll");
      data::write_conll(task.dev, dir / "dev.conll");
      data::write_conll(task.test, dir / "test.conll");
      for (auto q : {data::EmbeddingQuality::informative, data::EmbeddingQuality::random})
        data::write_embeddings(data::make_embeddings(task.vocabulary, gen_dim, q, gen_spec.seed),
                               dir / ("embeddings." + std::string(data::embedding_quality_name(q)) + ".txt"));
      std::fprintf(stderr, "wrote %zu/%zu/%zu sentences to %s\n", task.train.sentences.size(),
                   task.dev.sentences.size(), task.test.sentences.size(), dir.string().c_str());
      return 0;
    }

    if (*train) {
      auto config = load_config(train_config);
      if (g.seed) config.seed = *g.seed;
      const auto ws = load_workspace(train_data);
      tagger::TrainOptions options;
      options.keep_sentence_counts = train_counts;
      options.checkpoint = train_checkpoint;
      options.on_epoch = [](std::size_t epoch, double dev, double test) {
        std::fprintf(stderr, "epoch %zu: dev %.4f test %.4f\n", epoch, dev, test);
      };
      const auto record = tagger::run_training(config, ws->task, *ws->catalog, options);
      if (!g.store.empty()) harness::ResultsStore(g.store).append(record);
      emit(g, harness::serialize_record(record) + "\n");
      return 0;
    }

    if (*sweep) {
      const auto config = load_config(sweep_config);
      const auto ws = load_workspace(sweep_data);
      std::vector<std::uint64_t> seeds(sweep_n);
      std::iota(seeds.begin(), seeds.end(), g.seed.value_or(1));
      harness::ResultsStore store(g.store);
      const auto runs = harness::run_seed_sweep(config, seeds, {ws->task, *ws->catalog}, store,
                                                runner_options(g, sweep_counts));
      emit(g, harness::render_seed_report("seed sweep", runs));
      return 0;
    }

    if (*study) {
      auto space = harness::ConfigSpace::design_space();
      space.base = load_config(study_base);
      const auto axis = harness::parse_axis(study_axis);
      auto options = study_options.empty() ? harness::axis_options(space, axis) : split_list(study_options);
      const auto plan = harness::make_paired_study(space, axis, std::move(options), study_n, g.seed.value_or(1));
      const auto ws = load_workspace(study_data);
      harness::ResultsStore store(g.store);
      const auto result = harness::run_paired_study(plan, {ws->task, *ws->catalog}, store, runner_options(g, false));
      const harness::AxisTableRow rows[] = {harness::make_axis_row(study_task, ws->task.spec.kind, result)};
      std::ostringstream os;
      os << harness::render_axis_table(rows) << "\n";
      for (const auto& c : result.comparisons)
        os << result.options[c.a] << " vs " << result.options[c.b] << ": wins "
           << harness::format_percent(c.comparison.win_rate_a, 1) << " / "
           << harness::format_percent(c.comparison.win_rate_b, 1) << ", ties "
           << harness::format_percent(c.comparison.tie_rate, 1) << ", median difference "
           << harness::format_percent(c.comparison.delta_median, 2) << "\n";
      if (result.brown_forsythe)
        os << "Brown-Forsythe over option groups: F = " << result.brown_forsythe->statistic
           << ", p = " << result.brown_forsythe->p_value << "\n";
      emit(g, os.str());
      return 0;
    }

    if (*compare) {
      if (!cmp_summaries.empty()) {
        emit(g, harness::render_summary_table(harness::load_summaries(cmp_summaries)));
        return 0;
      }
      if (cmp_a.empty() || cmp_b.empty() || g.store.empty())
        throw InvalidInput("compare needs --summaries, or --store with --a and --b");
      if (g.seed) cmp_options.seed = *g.seed;
      const harness::ResultsStore store(g.store);
      const auto a = select_config(store, cmp_a);
      const auto b = select_config(store, cmp_b);
      emit(g, harness::render_comparison(harness::compare_systems(a, b, cmp_name_a, cmp_name_b, cmp_options)));
      return 0;
    }

    if (*report) {
      if (!report_fixture.empty()) {
        emit(g, harness::render_axis_table(harness::load_axis_fixture(report_fixture)));
        return 0;
      }
      if (g.store.empty()) throw InvalidInput("report needs --store or --axis-fixture");
      const harness::ResultsStore store(g.store);
      std::ostringstream os;
      if (!report_hash.empty()) {
        os << harness::render_seed_report(report_hash, select_config(store, report_hash));
      } else {
        std::vector<std::string> hashes;
        for (const auto& r : store.records())
          if (r.axis_option.empty() && std::find(hashes.begin(), hashes.end(), r.config_hash) == hashes.end())
            hashes.push_back(r.config_hash);
        for (const auto& h : hashes) os << harness::render_seed_report(h, store.select(h)) << "\n";
      }
      emit(g, os.str());
      return 0;
    }

    if (*violin) {
      if (g.store.empty()) throw InvalidInput("export-violin needs --store");
      const harness::ResultsStore store(g.store);
      const auto runs = select_config(store, violin_hash);
      if (g.out.empty())
        std::cout << harness::format_distribution(runs);
      else
        harness::export_distribution(runs, g.out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "seedlab: %s\n", e.what());
    return exit_code_for(e);
  }
  return 0;
}
