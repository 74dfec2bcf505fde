#include "seedlab/tagger/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "seedlab/error.hpp"
#include "seedlab/nn/checkpoint.hpp"
#include "seedlab/nn/gradients.hpp"
#include "seedlab/optim.hpp"

namespace seedlab::tagger {

namespace {

std::vector<EncodedSentence> encode_corpus(const Vocabularies& vocab, const data::Corpus& corpus) {
  std::vector<EncodedSentence> out;
  out.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) out.push_back(encode_sentence(vocab, s.tokens, s.tags));
  return out;
}

bool finite_grads(std::span<nn::Parameter* const> params) {
  for (const auto* p : params)
    if (!p->grad.all_finite()) return false;
  return true;
}

bool finite_values(std::span<nn::Parameter* const> params) {
  for (const auto* p : params)
    if (!p->value.all_finite()) return false;
  return true;
}

void apply_treatment(const GradTreatment& g, std::span<nn::Parameter* const> params) {
  switch (g.kind) {
    case GradTreatmentKind::none:
      break;
    case GradTreatmentKind::clip:
      nn::clip_gradients(params, g.threshold);
      break;
    case GradTreatmentKind::normalize:
      nn::normalize_gradients(params, g.threshold);
      break;
  }
}

}  // namespace

EvalResult evaluate(const TaggerModel& model, const data::Corpus& gold, data::TaskKind kind) {
  if (gold.sentences.empty()) throw InvalidInput("evaluation corpus is empty");
  EvalResult r;
  r.sentence_counts.reserve(gold.sentences.size());
  score::MatchCounts total;
  for (const auto& s : gold.sentences) {
    const auto ids = model.predict_ids(encode_sentence(model.vocab(), s.tokens));
    codec::TagSequence pred;
    pred.reserve(ids.size());
    for (int id : ids) pred.push_back(model.vocab().labels[static_cast<std::size_t>(id)]);
    const auto c = kind == data::TaskKind::span_task
                       ? score::sentence_counts(s.tags, pred, model.config().scheme)
                       : score::token_counts(s.tags, pred);
    total += c;
    r.sentence_counts.push_back(c);
  }
  r.score = score::f1_score(total);
  return r;
}

RunRecord train(TaggerModel& model, const data::Corpus& train_set, const data::Corpus& dev_set,
                const data::Corpus& test_set, data::TaskKind kind, const TrainOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const NetworkConfig& config = model.config();
  if (train_set.sentences.empty() || dev_set.sentences.empty() || test_set.sentences.empty())
    throw InvalidInput("train, dev and test sets must be non-empty");

  const auto train_c = data::convert_corpus(train_set, config.scheme, kind);
  const auto dev_c = data::convert_corpus(dev_set, config.scheme, kind);
  const auto test_c = data::convert_corpus(test_set, config.scheme, kind);
  const auto train_enc = encode_corpus(model.vocab(), train_c);

  RunRecord record;
  record.config = config;
  record.config_hash = config_hash(config);
  record.seed = config.seed;

  Rng shuffle_rng = run_stream(config.seed, RunStream::shuffle);
  Rng dropout_rng = run_stream(config.seed, RunStream::dropout);
  const auto params = model.parameters();
  optim::Optimizer optimizer(config.optimizer);
  optimizer.bind(params);

  std::vector<std::size_t> order(train_enc.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<nn::Tensor> best_values;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs && !record.diverged; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - begin);
      nn::zero_grads(params);
      bool finite = true;
      for (std::size_t i = begin; i < end && finite; ++i)
        finite = std::isfinite(model.accumulate_gradients(train_enc[order[i]], dropout_rng, weight));
      if (!finite || !finite_grads(params)) {
        record.diverged = true;
        break;
      }
      apply_treatment(config.grad_treatment, params);
      optimizer.apply(params);
    }
    if (record.diverged || !finite_values(params)) {
      record.diverged = true;
      break;
    }

    const double dev = evaluate(model, dev_c, kind).score;
    auto test_eval = evaluate(model, test_c, kind);
    record.dev_scores.push_back(dev);
    record.test_scores.push_back(test_eval.score);
    record.epochs_run = epoch;
    if (options.on_epoch) options.on_epoch(epoch, dev, test_eval.score);

    if (record.best_dev_epoch == 0 || dev > record.final_dev_score) {
      record.best_dev_epoch = epoch;
      record.final_dev_score = dev;
      record.final_test_score = test_eval.score;
      if (options.keep_sentence_counts) record.test_sentence_counts = std::move(test_eval.sentence_counts);
      best_values.clear();
      for (const auto* p : params) best_values.push_back(p->value);
      since_best = 0;
    } else if (++since_best >= config.patience && config.patience > 0) {
      break;
    }
  }
  record.epochs_to_best = record.best_dev_epoch;

  if (!best_values.empty())
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  if (!options.checkpoint.empty()) {
    nn::zero_grads(params);
    std::vector<const nn::Parameter*> view(params.begin(), params.end());
    nn::write_checkpoint(options.checkpoint, view);
  }
  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

RunRecord run_training(const NetworkConfig& config, const data::TaskData& task,
                       const EmbeddingCatalog& catalog, const TrainOptions& options) {
  auto model = build_model(config, task, catalog);
  return train(*model, task.train, task.dev, task.test, task.spec.kind, options);
}

}  // namespace seedlab::tagger
