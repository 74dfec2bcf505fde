#include "seedlab/harness/config_space.hpp"

#include <charconv>
#include <cstdio>
#include <set>

#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::harness {

using tagger::NetworkConfig;

namespace {

std::string format_threshold(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string dropout_label(const DropoutChoice& d) {
  if (d.mode == nn::DropoutMode::none) return "none";
  return std::string(nn::dropout_mode_name(d.mode)) + ":" + format_threshold(d.rate);
}

std::string grad_label(const tagger::GradTreatment& g) {
  if (g.kind == tagger::GradTreatmentKind::none) return "none";
  return std::string(tagger::grad_treatment_name(g.kind)) + ":" + format_threshold(g.threshold);
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || v == 0)
    throw ConfigError("bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

// "<name>:<value>" -> (name, value)
std::pair<std::string_view, std::string_view> split_option(std::string_view option) {
  const auto colon = option.find(':');
  if (colon == std::string_view::npos) return {option, {}};
  return {option.substr(0, colon), option.substr(colon + 1)};
}

template <typename T>
const T& pick(const std::vector<T>& axis, Rng& rng) {
  return axis[static_cast<std::size_t>(rng.below(axis.size()))];
}

}  // namespace

ConfigSpace ConfigSpace::design_space() {
  ConfigSpace s;
  s.char_rep = {tagger::CharRep::none, tagger::CharRep::cnn, tagger::CharRep::lstm};
  s.classifier = {tagger::Classifier::softmax, tagger::Classifier::crf};
  s.optimizer = {optim::OptimizerKind::SGD,     optim::OptimizerKind::Adagrad,
                 optim::OptimizerKind::Adadelta, optim::OptimizerKind::RMSProp,
                 optim::OptimizerKind::Adam,     optim::OptimizerKind::Nadam};
  s.dropout.push_back({nn::DropoutMode::none, 0.0});
  for (auto mode : {nn::DropoutMode::naive, nn::DropoutMode::variational})
    for (double rate : tagger::kDropoutRates) s.dropout.push_back({mode, rate});
  s.grad_treatment.push_back({tagger::GradTreatmentKind::none, 1.0});
  for (auto kind : {tagger::GradTreatmentKind::clip, tagger::GradTreatmentKind::normalize})
    for (double t : tagger::kGradThresholds) s.grad_treatment.push_back({kind, t});
  s.scheme = {codec::TagScheme::BIO, codec::TagScheme::IOBES};
  s.layers = {1, 2, 3};
  s.units.assign(std::begin(tagger::kUnitChoices), std::end(tagger::kUnitChoices));
  s.batch_size.assign(std::begin(tagger::kBatchChoices), std::end(tagger::kBatchChoices));
  s.embedding_quality = {data::EmbeddingQuality::random, data::EmbeddingQuality::informative};
  return s;
}

void ConfigSpace::validate() const {
  auto check = [](bool empty, const char* name) {
    if (empty) throw ConfigError(std::string("config space axis '") + name + "' is empty");
  };
  check(char_rep.empty(), "char_rep");
  check(classifier.empty(), "classifier");
  check(optimizer.empty(), "optimizer");
  check(dropout.empty(), "dropout");
  check(grad_treatment.empty(), "grad_treatment");
  check(scheme.empty(), "scheme");
  check(layers.empty(), "layers");
  check(units.empty(), "units");
  check(batch_size.empty(), "batch_size");
  check(embedding_quality.empty(), "embedding_quality");
}

std::vector<NetworkConfig> sample_configs(const ConfigSpace& space, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("sample at least one configuration");
  space.validate();
  Rng rng(seed);
  std::vector<NetworkConfig> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    NetworkConfig c = space.base;
    c.char_rep = pick(space.char_rep, rng);
    c.classifier = pick(space.classifier, rng);
    c.optimizer = optim::OptimizerConfig::defaults(pick(space.optimizer, rng));
    const auto& d = pick(space.dropout, rng);
    c.dropout = d.mode;
    c.dropout_rate = d.mode == nn::DropoutMode::none ? 0.0 : d.rate;
    c.grad_treatment = pick(space.grad_treatment, rng);
    c.scheme = pick(space.scheme, rng);
    c.units.assign(pick(space.layers, rng), 0);
    for (auto& u : c.units) u = pick(space.units, rng);
    c.batch_size = pick(space.batch_size, rng);
    c.embedding_source =
        "synthetic:" + std::string(data::embedding_quality_name(pick(space.embedding_quality, rng)));
    c.seed = rng.next_u64() >> 32;
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

std::string_view axis_name(Axis axis) noexcept {
  switch (axis) {
    case Axis::char_rep:
      return "char_rep";
    case Axis::classifier:
      return "classifier";
    case Axis::optimizer:
      return "optimizer";
    case Axis::dropout:
      return "dropout";
    case Axis::grad_treatment:
      return "grad_treatment";
    case Axis::scheme:
      return "scheme";
    case Axis::layers:
      return "layers";
    case Axis::batch_size:
      return "batch_size";
    case Axis::embedding_quality:
      return "embedding_quality";
  }
  return "classifier";
}

Axis parse_axis(std::string_view name) {
  for (auto a : {Axis::char_rep, Axis::classifier, Axis::optimizer, Axis::dropout,
                 Axis::grad_treatment, Axis::scheme, Axis::layers, Axis::batch_size,
                 Axis::embedding_quality})
    if (name == axis_name(a)) return a;
  throw ConfigError("unknown axis '" + std::string(name) + "'");
}

std::vector<std::string> axis_options(const ConfigSpace& space, Axis axis) {
  std::vector<std::string> out;
  switch (axis) {
    case Axis::char_rep:
      for (auto r : space.char_rep) out.emplace_back(tagger::char_rep_name(r));
      break;
    case Axis::classifier:
      for (auto c : space.classifier) out.emplace_back(tagger::classifier_name(c));
      break;
    case Axis::optimizer:
      for (auto k : space.optimizer) out.emplace_back(optim::optimizer_name(k));
      break;
    case Axis::dropout:
      for (const auto& d : space.dropout) out.push_back(dropout_label(d));
      break;
    case Axis::grad_treatment:
      for (const auto& g : space.grad_treatment) out.push_back(grad_label(g));
      break;
    case Axis::scheme:
      for (auto s : space.scheme) out.emplace_back(codec::scheme_name(s));
      break;
    case Axis::layers:
      for (auto l : space.layers) out.push_back(std::to_string(l));
      break;
    case Axis::batch_size:
      for (auto b : space.batch_size) out.push_back(std::to_string(b));
      break;
    case Axis::embedding_quality:
      for (auto q : space.embedding_quality) out.emplace_back(data::embedding_quality_name(q));
      break;
  }
  return out;
}

void apply_option(Axis axis, std::string_view option, NetworkConfig& c) {
  switch (axis) {
    case Axis::char_rep:
      c.char_rep = tagger::parse_char_rep(option);
      return;
    case Axis::classifier:
      c.classifier = tagger::parse_classifier(option);
      return;
    case Axis::optimizer:
      c.optimizer = optim::OptimizerConfig::defaults(optim::parse_optimizer(option));
      return;
    case Axis::dropout: {
      const auto [mode, rate] = split_option(option);
      c.dropout = nn::parse_dropout_mode(mode);
      if (c.dropout == nn::DropoutMode::none) {
        if (!rate.empty()) throw ConfigError("dropout 'none' takes no rate");
        c.dropout_rate = 0.0;
      } else {
        if (rate.empty()) throw ConfigError("dropout option needs a rate, e.g. variational:0.25");
        c.dropout_rate = parse_number(rate, "dropout rate");
      }
      return;
    }
    case Axis::grad_treatment: {
      const auto [kind, threshold] = split_option(option);
      c.grad_treatment.kind = tagger::parse_grad_treatment(kind);
      if (c.grad_treatment.kind == tagger::GradTreatmentKind::none) {
        if (!threshold.empty()) throw ConfigError("gradient treatment 'none' takes no threshold");
        c.grad_treatment.threshold = 1.0;
      } else {
        if (threshold.empty()) throw ConfigError("gradient option needs a threshold, e.g. clip:5");
        c.grad_treatment.threshold = parse_number(threshold, "gradient threshold");
      }
      return;
    }
    case Axis::scheme:
      c.scheme = codec::parse_scheme(option);
      return;
    case Axis::layers: {
      const std::size_t n = parse_count(option, "layer count");
      const std::size_t last = c.units.empty() ? tagger::kUnitChoices[0] : c.units.back();
      c.units.resize(n, last);
      return;
    }
    case Axis::batch_size:
      c.batch_size = parse_count(option, "batch size");
      return;
    case Axis::embedding_quality:
      c.embedding_source =
          "synthetic:" + std::string(data::embedding_quality_name(data::parse_embedding_quality(option)));
      return;
  }
}

void PairedStudy::validate() const {
  if (options.size() < 2) throw ConfigError("a paired study needs at least two options");
  if (std::set<std::string>(options.begin(), options.end()).size() != options.size())
    throw ConfigError("paired study options must be distinct");
  if (base_configs.empty()) throw ConfigError("a paired study needs at least one configuration");
  for (const auto& base : base_configs) {
    for (const auto& o : options) {
      NetworkConfig c = base;
      apply_option(axis, o, c);
      c.validate();
    }
  }
}

PairedStudy make_paired_study(const ConfigSpace& space, Axis axis, std::vector<std::string> options,
                              std::size_t n_configs, std::uint64_t seed) {
  PairedStudy s;
  s.axis = axis;
  s.options = std::move(options);
  s.base_configs = sample_configs(space, n_configs, seed);
  s.validate();
  return s;
}

std::string axis_option_key(Axis axis, std::string_view option) {
  return std::string(axis_name(axis)) + "=" + std::string(option);
}

}  // namespace seedlab::harness
