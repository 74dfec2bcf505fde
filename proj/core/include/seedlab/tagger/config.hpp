#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seedlab/nn/dropout.hpp"
#include "seedlab/optim.hpp"
#include "seedlab/tagcodec.hpp"

namespace seedlab::tagger {

enum class CharRep { none, cnn, lstm };
enum class Classifier { softmax, crf };
enum class GradTreatmentKind { none, clip, normalize };

std::string_view char_rep_name(CharRep rep) noexcept;
CharRep parse_char_rep(std::string_view name);
std::string_view classifier_name(Classifier c) noexcept;
Classifier parse_classifier(std::string_view name);
std::string_view grad_treatment_name(GradTreatmentKind kind) noexcept;
GradTreatmentKind parse_grad_treatment(std::string_view name);

struct GradTreatment {
  GradTreatmentKind kind = GradTreatmentKind::none;
  double threshold = 1.0;
  friend bool operator==(const GradTreatment&, const GradTreatment&) = default;
};

// Values evaluated in the design-space study; sampled configurations stay inside them.
inline constexpr std::size_t kUnitChoices[] = {25, 50, 75, 100, 125};
inline constexpr std::size_t kBatchChoices[] = {1, 8, 16, 32, 64};
inline constexpr double kDropoutRates[] = {0.05, 0.1, 0.25, 0.5};
inline constexpr double kGradThresholds[] = {1.0, 3.0, 5.0, 10.0};

struct NetworkConfig {
  // "synthetic:informative", "synthetic:random", "file:<path>", "none" (trainable
  // random init), or any name registered in an EmbeddingCatalog.
  std::string embedding_source = "synthetic:informative";
  std::size_t embedding_dim = 50;
  bool train_embeddings = false;

  CharRep char_rep = CharRep::none;
  std::size_t char_dim = 30;
  std::size_t char_cnn_filters = 30;
  std::size_t char_lstm_units = 25;

  std::vector<std::size_t> units = {100};  // one entry per stacked BiLSTM layer
  Classifier classifier = Classifier::crf;
  nn::DropoutMode dropout = nn::DropoutMode::variational;
  double dropout_rate = 0.25;
  optim::OptimizerConfig optimizer = optim::OptimizerConfig::defaults(optim::OptimizerKind::Nadam);
  GradTreatment grad_treatment = {GradTreatmentKind::normalize, 1.0};
  codec::TagScheme scheme = codec::TagScheme::BIO;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 1;

  std::size_t layers() const noexcept { return units.size(); }

  // Structural validity: 1-3 layers, positive sizes, rates in range. Throws ConfigError.
  void validate() const;
  // True when every design-space axis holds one of the evaluated values.
  bool in_design_space() const noexcept;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Canonical JSON with a fixed field order; the seed is omitted unless requested.
std::string canonical_json(const NetworkConfig& config, bool include_seed = true);
// Missing fields keep their defaults; unknown enum values raise ConfigError.
NetworkConfig config_from_json(std::string_view text);

// 64-bit FNV-1a of canonical_json(config, false), as 16 hex digits. Seeds of one
// configuration share a hash.
std::string config_hash(const NetworkConfig& config);
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace seedlab::tagger
