#include "seedlab/harness/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "seedlab/error.hpp"

namespace seedlab::harness {

using detail::Json;
using tagger::RunRecord;

namespace {

std::string printf_string(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string format_sigma(double sd) { return printf_string("%.5f", sd); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

Json parse_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::optional<double> try_spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2) return std::nullopt;
  try {
    return stats::spearman(x, y);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
}

RandomizationSlot best_vs_worst(std::span<const RunRecord> runs, const CompareOptions& options) {
  RandomizationSlot slot;
  if (runs.size() < 2) {
    slot.reason = "needs at least two runs";
    return slot;
  }
  std::size_t best = 0;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].final_test_score > runs[best].final_test_score) best = i;
    if (runs[i].final_test_score < runs[worst].final_test_score) worst = i;
  }
  const auto& a = runs[best].test_sentence_counts;
  const auto& b = runs[worst].test_sentence_counts;
  if (a.empty() || b.empty()) {
    slot.reason = "per-sentence test counts were not stored";
    return slot;
  }
  if (a.size() != b.size()) {
    slot.reason = "runs were scored on different test sets";
    return slot;
  }
  slot.available = true;
  slot.best_seed = runs[best].seed;
  slot.worst_seed = runs[worst].seed;
  slot.test = stats::approx_randomization_test(a, b, options.iterations, options.seed);
  slot.bonferroni_m = options.bonferroni_m ? options.bonferroni_m : runs.size();
  slot.adjusted_p = stats::bonferroni(slot.test.p_value, slot.bonferroni_m);
  return slot;
}

stats::ScoreSummary summary_of(std::span<const RunRecord> runs) {
  const auto scores = final_test_scores(runs);
  return stats::summarize(scores);
}

}  // namespace

std::string format_percent(double fraction, int decimals) {
  char fmt[16];
  std::snprintf(fmt, sizeof fmt, "%%.%df%%%%", decimals);
  double v = 100.0 * fraction;
  if (v == 0.0) v = 0.0;  // no "-0.00%" for an exact zero
  return printf_string(fmt, v);
}

std::string format_double(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

std::vector<double> final_test_scores(std::span<const RunRecord> runs) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.final_test_score);
  return out;
}

std::vector<double> final_dev_scores(std::span<const RunRecord> runs) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.final_dev_score);
  return out;
}

// ---- summaries -----------------------------------------------------------------

std::string render_summary_table(std::span<const SystemSummary> systems) {
  std::ostringstream os;
  os << "| System | # Seed values | Min. F1 | Median F1 | Max. F1 | σ |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto& s : systems) {
    os << "| " << s.name << " | " << s.summary.n << " | " << format_percent(s.summary.min, 2)
       << " | " << format_percent(s.summary.median, 2) << " | "
       << format_percent(s.summary.max, 2) << " | " << format_sigma(s.summary.sd) << " |\n";
  }
  return os.str();
}

std::vector<SystemSummary> load_summaries(const std::filesystem::path& path) {
  const Json j = parse_json_file(path);
  if (!j.is_array()) throw ParseError(path.string() + ": expected a list of systems", 0);
  std::vector<SystemSummary> out;
  try {
    for (const auto& e : j) {
      SystemSummary s;
      s.name = e.at("name").get<std::string>();
      s.summary.n = e.at("n").get<std::size_t>();
      s.summary.min = e.at("min").get<double>();
      s.summary.median = e.at("median").get<double>();
      s.summary.max = e.at("max").get<double>();
      s.summary.sd = e.at("sd").get<double>();
      s.summary.q1 = e.value("q1", s.summary.median);
      s.summary.q3 = e.value("q3", s.summary.median);
      s.summary.mean = e.value("mean", s.summary.median);
      s.summary.p95 = e.value("p95", s.summary.max);
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return out;
}

SeedSpread seed_spread(std::span<const double> scores) {
  SeedSpread s;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t j = i + 1; j < scores.size(); ++j) diffs.push_back(std::abs(scores[i] - scores[j]));
  s.pairs = diffs.size();
  if (diffs.empty()) return s;
  std::sort(diffs.begin(), diffs.end());
  s.median = stats::quantile_sorted(diffs, 0.5);
  s.p95 = stats::quantile_sorted(diffs, 0.95);
  s.max = diffs.back();
  return s;
}

std::string render_seed_report(std::string_view name, std::span<const RunRecord> runs) {
  if (runs.empty()) throw InvalidInput("no runs to report");
  const auto test = final_test_scores(runs);
  const auto dev = final_dev_scores(runs);
  const auto s = stats::summarize(test);
  const auto spread = seed_spread(test);
  std::size_t diverged = 0;
  double epochs = 0.0;
  for (const auto& r : runs) {
    diverged += r.diverged ? 1 : 0;
    epochs += static_cast<double>(r.epochs_to_best);
  }

  std::ostringstream os;
  os << "Seed sweep: " << name << " (config " << runs.front().config_hash << ")\n\n";
  os << "| Runs | Min. | Q1 | Median | Q3 | Max. | Mean | σ |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  os << "| " << s.n << " | " << format_percent(s.min, 2) << " | " << format_percent(s.q1, 2)
     << " | " << format_percent(s.median, 2) << " | " << format_percent(s.q3, 2) << " | "
     << format_percent(s.max, 2) << " | " << format_percent(s.mean, 2) << " | "
     << format_sigma(s.sd) << " |\n\n";
  os << "Max - min test score: " << format_percent(s.max - s.min, 2) << "\n";
  os << "Pairwise seed difference over " << spread.pairs << " pairs: median "
     << format_percent(spread.median, 2) << ", 95th percentile " << format_percent(spread.p95, 2)
     << ", max " << format_percent(spread.max, 2) << "\n";
  if (const auto rho = try_spearman(dev, test))
    os << "Spearman dev vs test: " << printf_string("%.4f", *rho) << "\n";
  else
    os << "Spearman dev vs test: unavailable\n";
  os << "Mean epochs to best dev score: "
     << printf_string("%.1f", epochs / static_cast<double>(runs.size())) << "\n";
  os << "Diverged runs: " << diverged << "\n";
  return os.str();
}

// ---- comparison ------------------------------------------------------------------

ComparisonReport compare_systems(std::span<const RunRecord> runs_a, std::span<const RunRecord> runs_b,
                                 std::string name_a, std::string name_b,
                                 const CompareOptions& options) {
  if (runs_a.empty() || runs_b.empty()) throw InvalidInput("both systems need at least one run");
  ComparisonReport r;
  r.a = {std::move(name_a), summary_of(runs_a)};
  r.b = {std::move(name_b), summary_of(runs_b)};
  const auto test_a = final_test_scores(runs_a);
  const auto test_b = final_test_scores(runs_b);
  r.ks = stats::ks_two_sample(test_a, test_b);
  if (runs_a.size() >= 2 && runs_b.size() >= 2) {
    const std::vector<std::vector<double>> groups = {test_a, test_b};
    r.brown_forsythe = stats::brown_forsythe(groups);
  }
  r.spearman_a = try_spearman(final_dev_scores(runs_a), test_a);
  r.spearman_b = try_spearman(final_dev_scores(runs_b), test_b);
  r.randomization_a = best_vs_worst(runs_a, options);
  r.randomization_b = best_vs_worst(runs_b, options);
  return r;
}

std::string render_comparison(const ComparisonReport& r) {
  std::ostringstream os;
  const SystemSummary systems[] = {r.a, r.b};
  os << render_summary_table(systems) << "\n";
  for (const auto& s : systems)
    os << s.name << " quartiles: Q1 " << format_percent(s.summary.q1, 2) << ", median "
       << format_percent(s.summary.median, 2) << ", Q3 " << format_percent(s.summary.q3, 2) << "\n";
  os << "Kolmogorov-Smirnov: D = " << printf_string("%.4f", r.ks.statistic)
     << ", p = " << printf_string("%.4g", r.ks.p_value) << "\n";
  if (r.brown_forsythe)
    os << "Brown-Forsythe: F = " << printf_string("%.4f", r.brown_forsythe->statistic)
       << ", p = " << printf_string("%.4g", r.brown_forsythe->p_value) << "\n";
  else
    os << "Brown-Forsythe: unavailable (needs two runs per system)\n";
  auto rho = [](const std::optional<double>& v) {
    return v ? printf_string("%.4f", *v) : std::string("unavailable");
  };
  os << "Spearman dev vs test: " << r.a.name << " " << rho(r.spearman_a) << ", " << r.b.name << " "
     << rho(r.spearman_b) << "\n";
  auto slot = [&](const std::string& name, const RandomizationSlot& s) {
    os << "Randomization test, best vs worst run of " << name << ": ";
    if (!s.available) {
      os << "unavailable (" << s.reason << ")\n";
      return;
    }
    os << "seed " << s.best_seed << " vs seed " << s.worst_seed
       << ", |ΔF1| = " << printf_string("%.4f", s.test.statistic)
       << ", p = " << printf_string("%.4g", s.test.p_value) << ", Bonferroni m = " << s.bonferroni_m
       << ", adjusted p = " << printf_string("%.4g", s.adjusted_p) << "\n";
  };
  slot(r.a.name, r.randomization_a);
  slot(r.b.name, r.randomization_b);
  return os.str();
}

std::string format_distribution(std::span<const RunRecord> runs) {
  if (runs.empty()) throw InvalidInput("no runs to export");
  const auto s = summary_of(runs);
  std::ostringstream os;
  os << "# n," << s.n << "\n";
  const std::pair<const char*, double> fields[] = {{"min", s.min},   {"q1", s.q1},
                                                  {"median", s.median}, {"q3", s.q3},
                                                  {"max", s.max},   {"mean", s.mean},
                                                  {"sd", s.sd},     {"p95", s.p95}};
  for (const auto& [key, value] : fields) os << "# " << key << "," << format_double(value) << "\n";
  os << "seed,dev,test\n";
  for (const auto& r : runs)
    os << r.seed << "," << format_double(r.final_dev_score) << ","
       << format_double(r.final_test_score) << "\n";
  return os.str();
}

void export_distribution(std::span<const RunRecord> runs, const std::filesystem::path& path) {
  write_file(path, format_distribution(runs));
}

// ---- axis tables ----------------------------------------------------------------------

AxisTableRow make_axis_row(std::string task, std::string metric, std::vector<std::string> options,
                           const std::vector<std::vector<double>>& scores) {
  if (options.size() < 2 || scores.size() != options.size())
    throw InvalidInput("an axis row needs scores for at least two options");
  const std::size_t n = scores.front().size();
  if (n == 0) throw InvalidInput("an axis row needs at least one configuration");
  for (const auto& s : scores)
    if (s.size() != n) throw InvalidInput("every option needs one score per configuration");

  AxisTableRow row;
  row.task = std::move(task);
  row.metric = std::move(metric);
  row.options = std::move(options);
  row.n_configs = n;
  const std::size_t k = row.options.size();
  std::vector<double> wins(k, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    double best = scores[0][c];
    for (std::size_t o = 1; o < k; ++o) best = std::max(best, scores[o][c]);
    std::size_t tied = 0;
    for (std::size_t o = 0; o < k; ++o) tied += scores[o][c] == best ? 1 : 0;
    for (std::size_t o = 0; o < k; ++o)
      if (scores[o][c] == best) wins[o] += 1.0 / static_cast<double>(tied);
  }
  for (double w : wins) row.win_percent.push_back(100.0 * w / static_cast<double>(n));
  row.winner = static_cast<std::size_t>(
      std::max_element(row.win_percent.begin(), row.win_percent.end()) - row.win_percent.begin());
  row.delta.assign(k, std::nullopt);
  for (std::size_t o = 0; o < k; ++o) {
    if (o == row.winner) continue;
    std::vector<double> diffs(n);
    for (std::size_t c = 0; c < n; ++c) diffs[c] = scores[o][c] - scores[row.winner][c];
    row.delta[o] = stats::median(diffs);
  }
  return row;
}

AxisTableRow make_axis_row(std::string task, data::TaskKind kind, const PairedStudyResult& study) {
  return make_axis_row(std::move(task), kind == data::TaskKind::token_task ? "Acc." : "F1",
                       study.options, study.test_scores());
}

std::string render_axis_table(std::span<const AxisTableRow> rows) {
  if (rows.empty()) throw InvalidInput("no axis rows to render");
  const auto& options = rows.front().options;
  auto pct = [](double p) { return printf_string("%.1f%%", p); };
  std::ostringstream os;
  os << "| Task | # Configs |";
  for (const auto& o : options) os << " " << o << " |";
  os << "\n|---|---|";
  for (std::size_t i = 0; i < options.size(); ++i) os << "---|";
  os << "\n";
  bool same_options = true;
  for (const auto& row : rows) {
    same_options = same_options && row.options == options;
    os << "| " << row.task << " | " << row.n_configs << " |";
    for (std::size_t o = 0; o < row.options.size(); ++o) {
      const auto cell = pct(row.win_percent[o]);
      os << " " << (o == row.winner ? "**" + cell + "**" : cell) << " |";
    }
    os << "\n| Δ" << row.metric << " | |";
    for (std::size_t o = 0; o < row.options.size(); ++o)
      os << (row.delta[o] ? " " + format_percent(*row.delta[o], 2) + " |" : std::string(" |"));
    os << "\n";
  }
  if (rows.size() > 1 && same_options) {
    std::vector<double> avg(options.size(), 0.0);
    for (const auto& row : rows)
      for (std::size_t o = 0; o < options.size(); ++o) avg[o] += row.win_percent[o];
    for (auto& a : avg) a /= static_cast<double>(rows.size());
    const auto best =
        static_cast<std::size_t>(std::max_element(avg.begin(), avg.end()) - avg.begin());
    os << "| Average | |";
    for (std::size_t o = 0; o < options.size(); ++o)
      os << " " << (o == best ? "**" + pct(avg[o]) + "**" : pct(avg[o])) << " |";
    os << "\n";
  }
  os << "\n";
  for (const auto& row : rows) {
    os << row.task << ": ";
    for (std::size_t o = 0; o < row.options.size(); ++o) os << (o ? " / " : "") << row.options[o];
    os << " = ";
    for (std::size_t o = 0; o < row.options.size(); ++o) os << (o ? " / " : "") << pct(row.win_percent[o]);
    os << "; winner " << row.options[row.winner] << "\n";
  }
  return os.str();
}

std::vector<AxisTableRow> load_axis_fixture(const std::filesystem::path& path) {
  const Json j = parse_json_file(path);
  std::vector<AxisTableRow> rows;
  auto load_one = [&](const Json& e) {
    rows.push_back(make_axis_row(e.at("task").get<std::string>(), e.value("metric", std::string("F1")),
                                 e.at("options").get<std::vector<std::string>>(),
                                 e.at("scores").get<std::vector<std::vector<double>>>()));
  };
  try {
    if (j.is_array()) {
      for (const auto& e : j) load_one(e);
    } else {
      load_one(j);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return rows;
}

}  // namespace seedlab::harness
