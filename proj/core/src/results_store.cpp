#include "seedlab/harness/results_store.hpp"

#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "seedlab/error.hpp"

namespace seedlab::harness {

using detail::Json;
using tagger::RunRecord;

RecordKey key_of(const RunRecord& r) { return {r.config_hash, r.axis_option, r.seed}; }

std::string serialize_record(const RunRecord& r, bool include_wall_time) {
  Json j;
  j["v"] = kStoreSchemaVersion;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["axis_option"] = r.axis_option;
  j["config"] = detail::config_to_json(r.config, true);
  j["dev_scores"] = r.dev_scores;
  j["test_scores"] = r.test_scores;
  j["best_dev_epoch"] = r.best_dev_epoch;
  j["final_dev_score"] = r.final_dev_score;
  j["final_test_score"] = r.final_test_score;
  j["epochs_to_best"] = r.epochs_to_best;
  j["epochs_run"] = r.epochs_run;
  j["diverged"] = r.diverged;
  if (!r.test_sentence_counts.empty()) {
    Json counts = Json::array();
    for (const auto& c : r.test_sentence_counts) counts.push_back(Json::array({c.tp, c.fp, c.fn}));
    j["test_sentence_counts"] = std::move(counts);
  }
  if (include_wall_time) j["wall_time"] = r.wall_time_seconds;
  return j.dump();
}

RunRecord parse_record(std::string_view line) {
  try {
    const Json j = Json::parse(line);
    if (!j.is_object()) throw ParseError("record is not a JSON object", 0);
    if (j.at("v").get<int>() != kStoreSchemaVersion)
      throw ParseError("unsupported record version " + j.at("v").dump(), 0);
    RunRecord r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.axis_option = j.at("axis_option").get<std::string>();
    r.config = detail::config_from_json(j.at("config"));
    r.dev_scores = j.at("dev_scores").get<std::vector<double>>();
    r.test_scores = j.at("test_scores").get<std::vector<double>>();
    r.best_dev_epoch = j.at("best_dev_epoch").get<std::size_t>();
    r.final_dev_score = j.at("final_dev_score").get<double>();
    r.final_test_score = j.at("final_test_score").get<double>();
    r.epochs_to_best = j.at("epochs_to_best").get<std::size_t>();
    r.epochs_run = j.at("epochs_run").get<std::size_t>();
    r.diverged = j.at("diverged").get<bool>();
    if (j.contains("test_sentence_counts")) {
      for (const auto& c : j.at("test_sentence_counts")) {
        if (!c.is_array() || c.size() != 3) throw ParseError("sentence counts need 3 entries", 0);
        r.test_sentence_counts.push_back(
            {c[0].get<std::uint64_t>(), c[1].get<std::uint64_t>(), c[2].get<std::uint64_t>()});
      }
    }
    if (j.contains("wall_time")) r.wall_time_seconds = j.at("wall_time").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), 0);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed record config: ") + e.what(), 0);
  }
}

ResultsStore::ResultsStore(std::filesystem::path path, bool include_wall_time)
    : path_(std::move(path)), include_wall_time_(include_wall_time) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw IoError("cannot read results store " + path_.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    RunRecord r;
    try {
      r = parse_record(line);
    } catch (const ParseError& e) {
      throw IntegrityError(path_.string() + ": line " + std::to_string(number) + ": " + e.what());
    }
    const auto key = key_of(r);
    if (index_.count(key))
      throw IntegrityError(path_.string() + ": line " + std::to_string(number) +
                           ": key stored twice (" + r.config_hash + ", seed " +
                           std::to_string(r.seed) + ")");
    index_.emplace(key, records_.size());
    lines_.push_back(serialize_record(r, false));
    records_.push_back(std::move(r));
  }
}

bool ResultsStore::contains(const RecordKey& key) const {
  std::lock_guard lock(mutex_);
  return index_.count(key) > 0;
}

std::optional<RunRecord> ResultsStore::find(const RecordKey& key) const {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

bool ResultsStore::append(const RunRecord& record) {
  const auto key = key_of(record);
  std::string canonical = serialize_record(record, false);
  std::lock_guard lock(mutex_);
  if (const auto it = index_.find(key); it != index_.end()) {
    if (lines_[it->second] == canonical) return false;
    throw IntegrityError("store already holds a different record for config " + key.config_hash +
                         (key.axis_option.empty() ? "" : " (" + key.axis_option + ")") +
                         ", seed " + std::to_string(key.seed));
  }
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    const std::string line =
        (include_wall_time_ ? serialize_record(record, true) : canonical) + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw IoError("cannot append to results store " + path_.string());
  }
  index_.emplace(key, records_.size());
  lines_.push_back(std::move(canonical));
  records_.push_back(record);
  return true;
}

std::vector<RunRecord> ResultsStore::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<RunRecord> ResultsStore::select(std::string_view config_hash,
                                            std::string_view axis_option) const {
  std::lock_guard lock(mutex_);
  std::vector<RunRecord> out;
  for (const auto& r : records_)
    if (r.config_hash == config_hash && r.axis_option == axis_option) out.push_back(r);
  return out;
}

std::size_t ResultsStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace seedlab::harness
