#include "seedlab/tagger/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "seedlab/error.hpp"

namespace seedlab::tagger {

Rng run_stream(std::uint64_t seed, RunStream stream) noexcept {
  return Rng::derive(seed, static_cast<std::uint64_t>(stream));
}

// ---- vocabularies ----------------------------------------------------------

int Vocabularies::word_id(const std::string& word) const {
  const auto it = word_index.find(word);
  return it == word_index.end() ? kUnknownWord : it->second;
}

int Vocabularies::label_id(const std::string& tag) const {
  const auto it = label_index.find(tag);
  if (it == label_index.end()) throw InvalidInput("tag '" + tag + "' is not in the label set");
  return it->second;
}

std::vector<int> Vocabularies::char_ids(const std::string& word) const {
  std::vector<int> ids;
  ids.reserve(word.size());
  for (unsigned char c : word) ids.push_back(char_index[c]);
  return ids;
}

Vocabularies build_vocabularies(const data::Corpus& train, std::span<const data::Corpus* const> others,
                                data::TaskKind kind, codec::TagScheme scheme,
                                const data::EmbeddingTable* embeddings) {
  Vocabularies v;
  v.words.push_back("<unk>");
  if (embeddings) {
    for (const auto& w : embeddings->words()) v.words.push_back(w);
  } else {
    std::set<std::string> seen;
    for (const auto& s : train.sentences) seen.insert(s.tokens.begin(), s.tokens.end());
    v.words.insert(v.words.end(), seen.begin(), seen.end());
  }
  for (std::size_t i = 0; i < v.words.size(); ++i)
    v.word_index.emplace(v.words[i], static_cast<int>(i));

  std::array<bool, 256> present{};
  for (const auto& s : train.sentences)
    for (const auto& tok : s.tokens)
      for (unsigned char c : tok) present[c] = true;
  v.char_index.fill(nn::kCharUnk);
  v.char_count = 2;
  for (std::size_t b = 0; b < 256; ++b)
    if (present[b]) v.char_index[b] = static_cast<int>(v.char_count++);

  std::set<std::string> inventory(train.label_inventory.begin(), train.label_inventory.end());
  for (const auto* c : others)
    if (c) inventory.insert(c->label_inventory.begin(), c->label_inventory.end());
  if (kind == data::TaskKind::span_task) {
    v.labels.push_back("O");
    const bool iobes = scheme == codec::TagScheme::IOBES;
    for (const auto& type : inventory) {
      v.labels.push_back("B-" + type);
      v.labels.push_back("I-" + type);
      if (iobes) {
        v.labels.push_back("E-" + type);
        v.labels.push_back("S-" + type);
      }
    }
  } else {
    v.labels.assign(inventory.begin(), inventory.end());
  }
  if (v.labels.empty()) throw InvalidInput("empty label set");
  for (std::size_t i = 0; i < v.labels.size(); ++i)
    v.label_index.emplace(v.labels[i], static_cast<int>(i));
  return v;
}

EncodedSentence encode_sentence(const Vocabularies& vocab, std::span<const std::string> tokens,
                                std::span<const std::string> tags) {
  if (tokens.empty()) throw InvalidInput("cannot tag an empty sentence");
  if (!tags.empty() && tags.size() != tokens.size())
    throw InvalidInput("token and tag counts differ");
  EncodedSentence s;
  s.words.reserve(tokens.size());
  s.chars.reserve(tokens.size());
  for (const auto& tok : tokens) {
    s.words.push_back(vocab.word_id(tok));
    s.chars.push_back(vocab.char_ids(tok));
  }
  s.labels.reserve(tags.size());
  for (const auto& tag : tags) s.labels.push_back(vocab.label_id(tag));
  return s;
}

// ---- embedding catalog -------------------------------------------------------

void EmbeddingCatalog::add(std::string name, data::EmbeddingTable table) {
  std::lock_guard lock(mutex_);
  cache_[std::move(name)] = std::make_shared<const data::EmbeddingTable>(std::move(table));
}

std::shared_ptr<const data::EmbeddingTable> EmbeddingCatalog::resolve(const std::string& source,
                                                                      std::size_t dim) const {
  if (source == "none") return nullptr;
  std::lock_guard lock(mutex_);
  auto checked = [&](std::shared_ptr<const data::EmbeddingTable> t) {
    if (t->dim() != dim)
      throw ConfigError("embedding source '" + source + "' has dimension " +
                        std::to_string(t->dim()) + ", config asks for " + std::to_string(dim));
    return t;
  };
  if (auto it = cache_.find(source); it != cache_.end()) return checked(it->second);

  constexpr std::string_view synthetic = "synthetic:";
  constexpr std::string_view file = "file:";
  if (source.starts_with(synthetic)) {
    const auto quality = data::parse_embedding_quality(source.substr(synthetic.size()));
    if (!task_) throw ConfigError("synthetic embeddings need a generated task");
    const std::string key = source + "#" + std::to_string(dim);
    auto& slot = cache_[key];
    if (!slot)
      slot = std::make_shared<const data::EmbeddingTable>(
          data::make_embeddings(task_->vocabulary, dim, quality, task_->spec.seed));
    return slot;
  }
  if (source.starts_with(file)) {
    auto table = std::make_shared<const data::EmbeddingTable>(
        data::read_embeddings(source.substr(file.size())));
    cache_[source] = table;
    return checked(table);
  }
  throw ConfigError("unknown embedding source '" + source + "'");
}

// ---- model -------------------------------------------------------------------

struct TaggerModel::Trace {
  std::vector<nn::CharCnnTrace> cnn;
  std::vector<nn::CharLstmTrace> char_lstm;
  nn::BiLstmTrace encoder;
};

TaggerModel::TaggerModel(const NetworkConfig& config, Vocabularies vocab,
                         const data::EmbeddingTable* pretrained, Rng& init_rng)
    : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  if (vocab_.words.empty() || vocab_.labels.empty()) throw InvalidInput("empty vocabulary");
  const std::size_t e = config_.embedding_dim;
  if (pretrained && pretrained->dim() != e)
    throw ConfigError("embedding table dimension does not match embedding_dim");

  // Every row is drawn so that the rng consumption does not depend on the source.
  nn::Tensor table(vocab_.words.size(), e);
  const double limit = std::sqrt(3.0 / static_cast<double>(e));
  for (auto& x : table.values()) x = init_rng.uniform(-limit, limit);
  if (pretrained) {
    for (std::size_t i = 1; i < vocab_.words.size(); ++i) {
      const auto idx = pretrained->find(vocab_.words[i]);
      if (!idx) continue;
      const auto src = pretrained->vector(*idx);
      std::copy(src.begin(), src.end(), table.row(i).begin());
    }
  }
  word_embedding_ = nn::Parameter("word_embedding", std::move(table));

  input_dim_ = e;
  if (config_.char_rep == CharRep::cnn) {
    char_cnn_ = nn::make_char_cnn("char_cnn", vocab_.char_count, config_.char_dim,
                                  config_.char_cnn_filters, init_rng);
    input_dim_ += char_cnn_->output_dim();
  } else if (config_.char_rep == CharRep::lstm) {
    char_lstm_ = nn::make_char_lstm("char_lstm", vocab_.char_count, config_.char_dim,
                                    config_.char_lstm_units, init_rng);
    input_dim_ += char_lstm_->output_dim();
  }
  encoder_ = nn::make_bilstm_stack("bilstm", input_dim_, config_.units, config_.dropout,
                                   config_.dropout_rate, init_rng);
  head_ = nn::make_linear("head", encoder_.output_dim(), vocab_.labels.size(), init_rng);
  if (config_.classifier == Classifier::crf) crf_ = nn::make_crf("crf", vocab_.labels.size());
}

std::vector<std::size_t> TaggerModel::layer_output_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& layer : encoder_.layers) dims.push_back(2 * layer.forward.units);
  return dims;
}

std::vector<nn::Parameter*> TaggerModel::parameters() {
  std::vector<nn::Parameter*> out;
  if (config_.train_embeddings) out.push_back(&word_embedding_);
  if (char_cnn_) char_cnn_->collect(out);
  if (char_lstm_) char_lstm_->collect(out);
  encoder_.collect(out);
  head_.collect(out);
  if (crf_) crf_->collect(out);
  return out;
}

std::vector<const nn::Parameter*> TaggerModel::parameters() const {
  const auto mutable_params = const_cast<TaggerModel*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t TaggerModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

nn::Tensor TaggerModel::embed(const EncodedSentence& s, Trace* trace) const {
  const std::size_t steps = s.words.size();
  if (steps == 0) throw InvalidInput("cannot tag an empty sentence");
  if (s.chars.size() != steps) throw InvalidInput("character ids missing for some tokens");
  const std::size_t e = config_.embedding_dim;
  nn::Tensor x(steps, input_dim_);
  if (trace) {
    if (char_cnn_) trace->cnn.resize(steps);
    if (char_lstm_) trace->char_lstm.resize(steps);
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const int id = s.words[t];
    const auto row = static_cast<std::size_t>(
        id < 0 || static_cast<std::size_t>(id) >= vocab_.words.size() ? kUnknownWord : id);
    const auto src = word_embedding_.value.row(row);
    auto dst = x.row(t);
    std::copy(src.begin(), src.end(), dst.begin());
    std::vector<double> chars;
    if (char_cnn_) chars = nn::char_cnn_encode(*char_cnn_, s.chars[t], trace ? &trace->cnn[t] : nullptr);
    if (char_lstm_)
      chars = nn::char_lstm_encode(*char_lstm_, s.chars[t], trace ? &trace->char_lstm[t] : nullptr);
    std::copy(chars.begin(), chars.end(), dst.begin() + static_cast<std::ptrdiff_t>(e));
  }
  return x;
}

double TaggerModel::head_loss(const nn::Tensor& emissions, std::span<const int> gold,
                              nn::Tensor* d_emissions, nn::Tensor* d_transitions) const {
  if (gold.size() != emissions.rows()) throw InvalidInput("sentence has no gold labels");
  if (crf_) {
    auto r = nn::crf_nll(emissions, crf_->transitions.value, gold);
    if (d_emissions) *d_emissions = std::move(r.d_emissions);
    if (d_transitions) *d_transitions = std::move(r.d_transitions);
    return r.loss;
  }
  auto r = nn::softmax_nll(emissions, gold);
  if (d_emissions) *d_emissions = std::move(r.grad);
  return r.loss;
}

double TaggerModel::accumulate_gradients(const EncodedSentence& s, Rng& dropout_rng, double weight) {
  Trace trace;
  const nn::Tensor x = embed(s, &trace);
  const nn::Tensor h = nn::bilstm_forward(encoder_, x, true, dropout_rng, &trace.encoder);
  const nn::Tensor em = nn::linear_forward(head_, h);
  nn::Tensor d_em;
  nn::Tensor d_tr;
  const double loss = head_loss(em, s.labels, &d_em, &d_tr);
  if (!std::isfinite(loss)) return loss;

  for (auto& v : d_em.values()) v *= weight;
  if (crf_) {
    auto g = crf_->transitions.grad.values();
    const auto d = d_tr.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += weight * d[i];
  }
  const nn::Tensor dh = nn::linear_backward(head_, h, d_em);
  const nn::Tensor dx = nn::bilstm_backward(encoder_, trace.encoder, dh);

  const std::size_t e = config_.embedding_dim;
  for (std::size_t t = 0; t < s.words.size(); ++t) {
    const auto grad_row = dx.row(t);
    if (config_.train_embeddings) {
      const int id = s.words[t];
      const auto row = static_cast<std::size_t>(
          id < 0 || static_cast<std::size_t>(id) >= vocab_.words.size() ? kUnknownWord : id);
      auto dst = word_embedding_.grad.row(row);
      for (std::size_t c = 0; c < e; ++c) dst[c] += grad_row[c];
    }
    const auto d_chars = grad_row.subspan(e);
    if (char_cnn_) nn::char_cnn_backward(*char_cnn_, trace.cnn[t], d_chars);
    if (char_lstm_) nn::char_lstm_backward(*char_lstm_, trace.char_lstm[t], d_chars);
  }
  return loss;
}

double TaggerModel::loss(const EncodedSentence& s, bool train_mode, Rng& rng) const {
  const nn::Tensor x = embed(s, nullptr);
  const nn::Tensor h = nn::bilstm_forward(encoder_, x, train_mode, rng, nullptr);
  return head_loss(nn::linear_forward(head_, h), s.labels, nullptr, nullptr);
}

nn::Tensor TaggerModel::emissions(const EncodedSentence& s) const {
  Rng unused(0);
  const nn::Tensor x = embed(s, nullptr);
  return nn::linear_forward(head_, nn::bilstm_forward(encoder_, x, false, unused, nullptr));
}

std::vector<int> TaggerModel::predict_ids(const EncodedSentence& s) const {
  const nn::Tensor em = emissions(s);
  return crf_ ? nn::crf_viterbi(em, crf_->transitions.value) : nn::argmax_rows(em);
}

std::vector<codec::TagSequence> TaggerModel::predict(
    std::span<const std::vector<std::string>> sentences) const {
  std::vector<codec::TagSequence> out;
  out.reserve(sentences.size());
  for (const auto& tokens : sentences) {
    const auto ids = predict_ids(encode_sentence(vocab_, tokens));
    codec::TagSequence tags;
    tags.reserve(ids.size());
    for (int id : ids) tags.push_back(vocab_.labels[static_cast<std::size_t>(id)]);
    out.push_back(std::move(tags));
  }
  return out;
}

std::unique_ptr<TaggerModel> build_model(const NetworkConfig& config, const data::TaskData& task,
                                         const EmbeddingCatalog& catalog) {
  config.validate();
  const auto table = catalog.resolve(config.embedding_source, config.embedding_dim);
  const data::Corpus* others[] = {&task.dev, &task.test};
  auto vocab = build_vocabularies(task.train, others, task.spec.kind, config.scheme, table.get());
  Rng init = run_stream(config.seed, RunStream::init);
  return std::make_unique<TaggerModel>(config, std::move(vocab), table.get(), init);
}

}  // namespace seedlab::tagger
