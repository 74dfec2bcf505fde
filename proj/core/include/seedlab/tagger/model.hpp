#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seedlab/dataset.hpp"
#include "seedlab/nn/char_encoders.hpp"
#include "seedlab/nn/crf.hpp"
#include "seedlab/nn/heads.hpp"
#include "seedlab/nn/lstm.hpp"
#include "seedlab/rng.hpp"
#include "seedlab/tagger/config.hpp"

namespace seedlab::tagger {

inline constexpr int kUnknownWord = 0;

// Independent random streams of one run, all derived from the run seed.
enum class RunStream : std::uint64_t { init = 1, shuffle = 2, dropout = 3 };
Rng run_stream(std::uint64_t seed, RunStream stream) noexcept;

struct Vocabularies {
  std::vector<std::string> words;   // index 0 is <unk>
  std::vector<std::string> labels;  // tag strings in the configured scheme
  std::map<std::string, int> word_index;
  std::map<std::string, int> label_index;
  std::array<int, 256> char_index{};  // byte -> id; 0 pad, 1 unk
  std::size_t char_count = 2;

  int word_id(const std::string& word) const;
  int label_id(const std::string& tag) const;  // throws InvalidInput for unknown tags
  std::vector<int> char_ids(const std::string& word) const;
};

// Words come from the embedding table when one is given (else the training
// words, sorted); characters from the training words; labels from the label
// inventories of all splits, expanded for the scheme ("O" first).
Vocabularies build_vocabularies(const data::Corpus& train, std::span<const data::Corpus* const> others,
                                data::TaskKind kind, codec::TagScheme scheme,
                                const data::EmbeddingTable* embeddings);

struct EncodedSentence {
  std::vector<int> words;
  std::vector<std::vector<int>> chars;
  std::vector<int> labels;  // empty when encoding unlabeled text
};

EncodedSentence encode_sentence(const Vocabularies& vocab, std::span<const std::string> tokens,
                                std::span<const std::string> tags = {});

// Resolves NetworkConfig::embedding_source. Synthetic tables are generated from
// the task vocabulary with the task seed, so they do not depend on the run seed.
// Thread-safe; resolved tables are cached.
class EmbeddingCatalog {
 public:
  explicit EmbeddingCatalog(const data::TaskData* task = nullptr) : task_(task) {}

  void add(std::string name, data::EmbeddingTable table);
  // nullptr for "none"; ConfigError for unknown sources or a dimension mismatch.
  std::shared_ptr<const data::EmbeddingTable> resolve(const std::string& source,
                                                      std::size_t dim) const;

 private:
  const data::TaskData* task_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const data::EmbeddingTable>> cache_;
};

class TaggerModel {
 public:
  TaggerModel(const NetworkConfig& config, Vocabularies vocab,
              const data::EmbeddingTable* pretrained, Rng& init_rng);

  const NetworkConfig& config() const noexcept { return config_; }
  const Vocabularies& vocab() const noexcept { return vocab_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t label_count() const noexcept { return vocab_.labels.size(); }
  // Per-layer BiLSTM output widths.
  std::vector<std::size_t> layer_output_dims() const;

  // Trainable parameters in a fixed order.
  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
  std::size_t parameter_count() const;

  // Forward and backward on one labeled sentence; gradients are scaled by
  // `weight` and accumulated. Returns the unscaled loss.
  double accumulate_gradients(const EncodedSentence& sentence, Rng& dropout_rng, double weight);
  // Forward-only loss (train_mode draws dropout masks from rng).
  double loss(const EncodedSentence& sentence, bool train_mode, Rng& rng) const;

  nn::Tensor emissions(const EncodedSentence& sentence) const;
  std::vector<int> predict_ids(const EncodedSentence& sentence) const;
  std::vector<codec::TagSequence> predict(std::span<const std::vector<std::string>> sentences) const;

  const nn::CrfParams* crf() const noexcept { return crf_ ? &*crf_ : nullptr; }
  nn::CrfParams* crf() noexcept { return crf_ ? &*crf_ : nullptr; }

 private:
  struct Trace;
  nn::Tensor embed(const EncodedSentence& sentence, Trace* trace) const;
  double head_loss(const nn::Tensor& emissions, std::span<const int> gold, nn::Tensor* d_emissions,
                   nn::Tensor* d_transitions) const;

  NetworkConfig config_;
  Vocabularies vocab_;
  std::size_t input_dim_ = 0;
  nn::Parameter word_embedding_;
  std::optional<nn::CharCnnParams> char_cnn_;
  std::optional<nn::CharLstmParams> char_lstm_;
  nn::BiLstmStack encoder_;
  nn::LinearParams head_;
  std::optional<nn::CrfParams> crf_;
};

// Checks the config, resolves its embedding source and builds vocabularies and
// model with the initialization stream of config.seed.
std::unique_ptr<TaggerModel> build_model(const NetworkConfig& config, const data::TaskData& task,
                                         const EmbeddingCatalog& catalog);

}  // namespace seedlab::tagger
