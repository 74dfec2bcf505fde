#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedlab/tagger/trainer.hpp"

namespace seedlab::harness {

inline constexpr int kStoreSchemaVersion = 1;

struct RecordKey {
  std::string config_hash;
  std::string axis_option;
  std::uint64_t seed = 0;
  friend auto operator<=>(const RecordKey&, const RecordKey&) = default;
};

RecordKey key_of(const tagger::RunRecord& record);

// One JSON object per line with a fixed field order. Wall time is written only
// when requested, so that replaying an experiment reproduces the bytes.
std::string serialize_record(const tagger::RunRecord& record, bool include_wall_time = false);
tagger::RunRecord parse_record(std::string_view line);

// Append-only store of run records. An empty path keeps records in memory
// only. All members are thread-safe.
class ResultsStore {
 public:
  explicit ResultsStore(std::filesystem::path path = {}, bool include_wall_time = false);

  const std::filesystem::path& path() const noexcept { return path_; }
  bool contains(const RecordKey& key) const;
  std::optional<tagger::RunRecord> find(const RecordKey& key) const;
  // true when appended, false when an identical record is already stored;
  // IntegrityError when the key holds a different record.
  bool append(const tagger::RunRecord& record);
  std::vector<tagger::RunRecord> records() const;
  // Records of one configuration (and axis option), in insertion order.
  std::vector<tagger::RunRecord> select(std::string_view config_hash,
                                        std::string_view axis_option = {}) const;
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  bool include_wall_time_;
  mutable std::mutex mutex_;
  std::vector<tagger::RunRecord> records_;
  std::vector<std::string> lines_;  // canonical form without wall time
  std::map<RecordKey, std::size_t> index_;
};

}  // namespace seedlab::harness
