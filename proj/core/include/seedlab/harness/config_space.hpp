#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seedlab/dataset.hpp"
#include "seedlab/tagger/config.hpp"

namespace seedlab::harness {

struct DropoutChoice {
  nn::DropoutMode mode = nn::DropoutMode::none;
  double rate = 0.0;
  friend bool operator==(const DropoutChoice&, const DropoutChoice&) = default;
};

// Candidate values per design axis. Fields not covered by an axis
// (embedding_dim, epochs, patience, char sizes) are taken from `base`.
struct ConfigSpace {
  std::vector<tagger::CharRep> char_rep;
  std::vector<tagger::Classifier> classifier;
  std::vector<optim::OptimizerKind> optimizer;
  std::vector<DropoutChoice> dropout;
  std::vector<tagger::GradTreatment> grad_treatment;
  std::vector<codec::TagScheme> scheme;
  std::vector<std::size_t> layers;
  std::vector<std::size_t> units;  // drawn independently for every layer
  std::vector<std::size_t> batch_size;
  std::vector<data::EmbeddingQuality> embedding_quality;
  tagger::NetworkConfig base;

  // The full evaluated grid.
  static ConfigSpace design_space();
  // Throws ConfigError when an axis is empty.
  void validate() const;
};

// Axis-wise uniform draws; every config also draws its own seed. Duplicates
// are possible and kept.
std::vector<tagger::NetworkConfig> sample_configs(const ConfigSpace& space, std::size_t n,
                                                  std::uint64_t seed);

enum class Axis { char_rep, classifier, optimizer, dropout, grad_treatment, scheme, layers,
                  batch_size, embedding_quality };

std::string_view axis_name(Axis axis) noexcept;
Axis parse_axis(std::string_view name);
// Option labels as accepted by apply_option, in ConfigSpace::design_space order.
std::vector<std::string> axis_options(const ConfigSpace& space, Axis axis);
// Labels: enum names ("crf", "cnn", "nadam", "IOBES"), "none", "naive:0.25",
// "variational:0.5", "clip:5", "normalize:1", layer or batch counts, and the
// embedding qualities "random"/"informative". Throws ConfigError on a bad label.
void apply_option(Axis axis, std::string_view option, tagger::NetworkConfig& config);

struct PairedStudy {
  Axis axis = Axis::classifier;
  std::vector<std::string> options;
  std::vector<tagger::NetworkConfig> base_configs;
  void validate() const;  // >= 2 distinct valid options, >= 1 config
};

PairedStudy make_paired_study(const ConfigSpace& space, Axis axis, std::vector<std::string> options,
                              std::size_t n_configs, std::uint64_t seed);

// "<axis>=<option>", the axis_option field of paired-study records.
std::string axis_option_key(Axis axis, std::string_view option);

}  // namespace seedlab::harness
