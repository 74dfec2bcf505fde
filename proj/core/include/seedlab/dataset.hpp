#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seedlab/tagcodec.hpp"

namespace seedlab::data {

enum class TaskKind { span_task, token_task };

std::string_view task_kind_name(TaskKind kind) noexcept;
TaskKind parse_task_kind(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::span_task;
  std::size_t vocab_size = 2000;
  std::vector<std::string> label_types = {"PER", "LOC", "ORG", "MISC"};
  std::size_t lexicon_size = 200;
  double avg_sentence_length = 12.0;
  double noise_rate = 0.15;
  std::size_t train_size = 800;
  std::size_t dev_size = 100;
  std::size_t test_size = 200;
  std::uint64_t seed = 13;

  // The frozen task every acceptance number refers to.
  static TaskSpec standard_span_task();
  void validate() const;
};

struct Sentence {
  std::vector<std::string> tokens;
  codec::TagSequence tags;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  codec::TagScheme scheme = codec::TagScheme::BIO;
  // Segment types for span tasks, token classes for token tasks; sorted.
  std::vector<std::string> label_inventory;

  std::size_t token_count() const noexcept;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Vocabulary entry of a generated task; type is empty for filler words.
struct LexiconEntry {
  std::string word;
  std::string type;
};

struct TaskData {
  TaskSpec spec;
  Corpus train;
  Corpus dev;
  Corpus test;
  std::vector<LexiconEntry> vocabulary;
};

TaskData generate(const TaskSpec& spec);

// Re-encodes every span sentence under `scheme`; token tasks are returned unchanged.
Corpus convert_corpus(const Corpus& corpus, codec::TagScheme scheme, TaskKind kind);

// ---- CoNLL column format -----------------------------------------------
// Whitespace-separated columns, blank line between sentences, "-DOCSTART-"
// lines skipped. Column indices are 0-based; a negative tag column counts
// from the end (-1 is the last column).
struct ConllOptions {
  std::size_t token_column = 0;
  int tag_column = -1;
  // When set, tags must be valid for this scheme.
  std::optional<codec::TagScheme> scheme = codec::TagScheme::BIO;
};

Corpus read_conll(const std::filesystem::path& path, const ConllOptions& options = {});
Corpus parse_conll(std::string_view text, const ConllOptions& options = {});
void write_conll(const Corpus& corpus, const std::filesystem::path& path);
std::string format_conll(const Corpus& corpus);

// ---- embeddings ----------------------------------------------------------

enum class EmbeddingQuality { random, informative };

std::string_view embedding_quality_name(EmbeddingQuality q) noexcept;
EmbeddingQuality parse_embedding_quality(std::string_view name);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> words, std::size_t dim, std::vector<double> values);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::span<const double> vector(std::size_t index) const noexcept {
    return {values_.data() + index * dim_, dim_};
  }
  std::optional<std::size_t> find(const std::string& word) const;

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::string> words_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::map<std::string, std::size_t> index_;
};

// Random: i.i.d. uniform in +-sqrt(3/dim). Informative: words of one type
// scatter around a shared centroid within kClusterRadiusFraction of the
// smallest inter-centroid distance; filler words are drawn like random ones.
inline constexpr double kClusterRadiusFraction = 0.3;

EmbeddingTable make_embeddings(const std::vector<LexiconEntry>& vocabulary, std::size_t dim,
                               EmbeddingQuality quality, std::uint64_t seed);

// Text format: first line "<count> <dim>", then "word v1 ... vdim" per line.
EmbeddingTable read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

}  // namespace seedlab::data
