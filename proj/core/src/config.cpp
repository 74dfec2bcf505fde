#include "seedlab/tagger/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json_io.hpp"
#include "seedlab/error.hpp"

namespace seedlab::tagger {

std::string_view char_rep_name(CharRep rep) noexcept {
  switch (rep) {
    case CharRep::none:
      return "none";
    case CharRep::cnn:
      return "cnn";
    case CharRep::lstm:
      return "lstm";
  }
  return "none";
}

CharRep parse_char_rep(std::string_view name) {
  for (auto r : {CharRep::none, CharRep::cnn, CharRep::lstm})
    if (name == char_rep_name(r)) return r;
  throw ConfigError("unknown char representation '" + std::string(name) + "'");
}

std::string_view classifier_name(Classifier c) noexcept {
  return c == Classifier::crf ? "crf" : "softmax";
}

Classifier parse_classifier(std::string_view name) {
  if (name == "crf") return Classifier::crf;
  if (name == "softmax") return Classifier::softmax;
  throw ConfigError("unknown classifier '" + std::string(name) + "'");
}

std::string_view grad_treatment_name(GradTreatmentKind kind) noexcept {
  switch (kind) {
    case GradTreatmentKind::none:
      return "none";
    case GradTreatmentKind::clip:
      return "clip";
    case GradTreatmentKind::normalize:
      return "normalize";
  }
  return "none";
}

GradTreatmentKind parse_grad_treatment(std::string_view name) {
  for (auto k : {GradTreatmentKind::none, GradTreatmentKind::clip, GradTreatmentKind::normalize})
    if (name == grad_treatment_name(k)) return k;
  throw ConfigError("unknown gradient treatment '" + std::string(name) + "'");
}

void NetworkConfig::validate() const {
  if (embedding_source.empty()) throw ConfigError("embedding_source is empty");
  if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
  if (units.empty() || units.size() > 3) throw ConfigError("1 to 3 BiLSTM layers are supported");
  for (auto u : units)
    if (u == 0) throw ConfigError("unit counts must be positive");
  if (char_rep != CharRep::none && char_dim == 0) throw ConfigError("char_dim must be positive");
  if (char_rep == CharRep::cnn && char_cnn_filters == 0)
    throw ConfigError("char_cnn_filters must be positive");
  if (char_rep == CharRep::lstm && char_lstm_units == 0)
    throw ConfigError("char_lstm_units must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
  optimizer.validate();
  if (grad_treatment.kind != GradTreatmentKind::none && !(grad_treatment.threshold > 0.0))
    throw ConfigError("gradient threshold must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
}

bool NetworkConfig::in_design_space() const noexcept {
  auto member = [](auto value, const auto& set) {
    return std::find(std::begin(set), std::end(set), value) != std::end(set);
  };
  if (units.empty() || units.size() > 3) return false;
  for (auto u : units)
    if (!member(u, kUnitChoices)) return false;
  if (!member(batch_size, kBatchChoices)) return false;
  if (dropout != nn::DropoutMode::none && !member(dropout_rate, kDropoutRates)) return false;
  if (grad_treatment.kind != GradTreatmentKind::none &&
      !member(grad_treatment.threshold, kGradThresholds))
    return false;
  return true;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_json(const NetworkConfig& config, bool include_seed) {
  return detail::config_to_json(config, include_seed).dump();
}

NetworkConfig config_from_json(std::string_view text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  return detail::config_from_json(j);
}

std::string config_hash(const NetworkConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json(config, false))));
  return buf;
}

}  // namespace seedlab::tagger

namespace seedlab::detail {

using namespace tagger;

Json config_to_json(const NetworkConfig& c, bool include_seed) {
  Json j;
  j["embedding_source"] = c.embedding_source;
  j["embedding_dim"] = c.embedding_dim;
  j["train_embeddings"] = c.train_embeddings;
  j["char_rep"] = char_rep_name(c.char_rep);
  j["char_dim"] = c.char_dim;
  j["char_cnn_filters"] = c.char_cnn_filters;
  j["char_lstm_units"] = c.char_lstm_units;
  j["units"] = c.units;
  j["classifier"] = classifier_name(c.classifier);
  j["dropout"] = Json{{"mode", nn::dropout_mode_name(c.dropout)}, {"rate", c.dropout_rate}};
  j["optimizer"] = Json{{"kind", optim::optimizer_name(c.optimizer.kind)},
                        {"learning_rate", c.optimizer.learning_rate},
                        {"rho", c.optimizer.rho},
                        {"beta1", c.optimizer.beta1},
                        {"beta2", c.optimizer.beta2},
                        {"epsilon", c.optimizer.epsilon},
                        {"nesterov", c.optimizer.nesterov}};
  j["grad_treatment"] = Json{{"kind", grad_treatment_name(c.grad_treatment.kind)},
                             {"threshold", c.grad_treatment.threshold}};
  j["scheme"] = codec::scheme_name(c.scheme);
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  if (include_seed) j["seed"] = c.seed;
  return j;
}

namespace {

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string read_name(const Json& j, const char* key, std::string_view fallback) {
  std::string s(fallback);
  read_field(j, key, s);
  return s;
}

}  // namespace

NetworkConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  NetworkConfig c;
  read_field(j, "embedding_source", c.embedding_source);
  read_field(j, "embedding_dim", c.embedding_dim);
  read_field(j, "train_embeddings", c.train_embeddings);
  c.char_rep = parse_char_rep(read_name(j, "char_rep", char_rep_name(c.char_rep)));
  read_field(j, "char_dim", c.char_dim);
  read_field(j, "char_cnn_filters", c.char_cnn_filters);
  read_field(j, "char_lstm_units", c.char_lstm_units);
  read_field(j, "units", c.units);
  c.classifier = parse_classifier(read_name(j, "classifier", classifier_name(c.classifier)));
  if (j.contains("dropout")) {
    const auto& d = j.at("dropout");
    if (!d.is_object()) throw ConfigError("config field 'dropout' must be an object");
    c.dropout = nn::parse_dropout_mode(read_name(d, "mode", nn::dropout_mode_name(c.dropout)));
    read_field(d, "rate", c.dropout_rate);
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    if (!o.is_object()) throw ConfigError("config field 'optimizer' must be an object");
    c.optimizer = optim::OptimizerConfig::defaults(
        optim::parse_optimizer(read_name(o, "kind", optim::optimizer_name(c.optimizer.kind))));
    read_field(o, "learning_rate", c.optimizer.learning_rate);
    read_field(o, "rho", c.optimizer.rho);
    read_field(o, "beta1", c.optimizer.beta1);
    read_field(o, "beta2", c.optimizer.beta2);
    read_field(o, "epsilon", c.optimizer.epsilon);
    read_field(o, "nesterov", c.optimizer.nesterov);
  }
  if (j.contains("grad_treatment")) {
    const auto& g = j.at("grad_treatment");
    if (!g.is_object()) throw ConfigError("config field 'grad_treatment' must be an object");
    c.grad_treatment.kind =
        parse_grad_treatment(read_name(g, "kind", grad_treatment_name(c.grad_treatment.kind)));
    read_field(g, "threshold", c.grad_treatment.threshold);
  }
  c.scheme = codec::parse_scheme(read_name(j, "scheme", codec::scheme_name(c.scheme)));
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "max_epochs", c.max_epochs);
  read_field(j, "patience", c.patience);
  read_field(j, "seed", c.seed);
  return c;
}

}  // namespace seedlab::detail
