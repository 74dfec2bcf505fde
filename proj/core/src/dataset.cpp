#include "seedlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::data {

std::string_view task_kind_name(TaskKind kind) noexcept {
  return kind == TaskKind::span_task ? "span" : "token";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "span" || name == "span_task") return TaskKind::span_task;
  if (name == "token" || name == "token_task") return TaskKind::token_task;
  throw ConfigError("unknown task kind '" + std::string(name) + "'");
}

TaskSpec TaskSpec::standard_span_task() {
  TaskSpec spec;
  spec.kind = TaskKind::span_task;
  spec.vocab_size = 2000;
  spec.label_types = {"PER", "LOC", "ORG", "MISC"};
  spec.lexicon_size = 200;
  spec.avg_sentence_length = 12.0;
  spec.noise_rate = 0.15;
  spec.train_size = 800;
  spec.dev_size = 100;
  spec.test_size = 200;
  spec.seed = 13;
  return spec;
}

namespace {

constexpr std::size_t kTriggersPerType = 2;
constexpr double kEntityRate = 0.3;
constexpr double kTriggerRate = 0.6;
constexpr double kSuffixRate = 0.5;

std::size_t ambiguous_pool_size(const TaskSpec& spec) {
  return std::max(spec.label_types.size() + 1, spec.lexicon_size / 10);
}

}  // namespace

void TaskSpec::validate() const {
  if (label_types.empty()) throw InvalidInput("task needs at least one label type");
  for (const auto& t : label_types)
    if (t.empty() || t.find_first_of(" \t\n") != std::string::npos)
      throw InvalidInput("label types must be non-empty and whitespace free");
  if (std::set<std::string>(label_types.begin(), label_types.end()).size() != label_types.size())
    throw InvalidInput("duplicate label type");
  if (train_size == 0 || dev_size == 0 || test_size == 0)
    throw InvalidInput("split sizes must be at least 1");
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) throw InvalidInput("noise_rate must lie in [0, 1)");
  if (!(avg_sentence_length >= 2.0)) throw InvalidInput("average sentence length must be >= 2");
  if (kind == TaskKind::span_task && lexicon_size < label_types.size())
    throw InvalidInput("entity lexicon smaller than the number of label types");
  const std::size_t reserved = (kind == TaskKind::span_task ? lexicon_size : label_types.size()) +
                               kTriggersPerType * label_types.size() + ambiguous_pool_size(*this) + 1;
  if (vocab_size < reserved)
    throw InvalidInput("vocabulary too small for lexicon, triggers and ambiguous pool");
}

std::size_t Corpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

namespace {

const char* const kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                               "br", "kr", "st", "tr", "sh", "ch"};
const char* const kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

std::string random_word(Rng& rng) {
  std::string w;
  const auto syllables = 1 + rng.below(3);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += kOnsets[rng.below(std::size(kOnsets))];
    w += kVowels[rng.below(std::size(kVowels))];
  }
  if (rng.bernoulli(0.3)) w += kOnsets[rng.below(std::size(kOnsets))];
  return w;
}

struct Grammar {
  std::vector<std::vector<std::string>> lexicon;   // per type
  std::vector<std::vector<std::string>> triggers;  // per type
  std::vector<std::string> filler;
  std::vector<std::string> ambiguous;
  std::vector<LexiconEntry> vocabulary;
};

Grammar build_grammar(const TaskSpec& spec, Rng& rng) {
  Grammar g;
  const std::size_t types = spec.label_types.size();
  std::unordered_set<std::string> used;
  auto fresh = [&](const std::string& suffix, bool suffix_allowed) {
    for (;;) {
      std::string w = random_word(rng);
      if (suffix_allowed && rng.bernoulli(kSuffixRate)) w += suffix;
      if (used.insert(w).second) return w;
    }
  };

  std::vector<std::string> suffixes(types);
  for (auto& s : suffixes) s = std::string("-") + kVowels[rng.below(std::size(kVowels))] +
                                   kOnsets[rng.below(std::size(kOnsets))];
  // Suffixes are type-specific; "-" keeps them from colliding with plain words.
  for (std::size_t k = 0; k < types; ++k) suffixes[k] += std::to_string(k);

  g.lexicon.resize(types);
  g.triggers.resize(types);
  const std::size_t lexicon =
      spec.kind == TaskKind::span_task ? spec.lexicon_size : std::size_t{0};
  for (std::size_t i = 0; i < lexicon; ++i) {
    const std::size_t k = i % types;
    auto w = fresh(suffixes[k], true);
    g.lexicon[k].push_back(w);
    g.vocabulary.push_back({w, spec.label_types[k]});
  }
  for (std::size_t k = 0; k < types; ++k) {
    for (std::size_t j = 0; j < kTriggersPerType; ++j) {
      auto w = fresh({}, false);
      g.triggers[k].push_back(w);
      g.vocabulary.push_back({w, {}});
    }
  }
  const std::size_t ambiguous = ambiguous_pool_size(spec);
  for (std::size_t i = 0; i < ambiguous; ++i) {
    auto w = fresh({}, false);
    g.ambiguous.push_back(w);
    g.vocabulary.push_back({w, {}});
  }
  while (g.vocabulary.size() < spec.vocab_size) {
    if (spec.kind == TaskKind::token_task) {
      // Token tasks spread the remaining vocabulary over the classes.
      const std::size_t k = g.filler.size() % types;
      auto w = fresh(suffixes[k], true);
      g.lexicon[k].push_back(w);
      g.filler.push_back(w);
      g.vocabulary.push_back({w, spec.label_types[k]});
    } else {
      auto w = fresh({}, false);
      g.filler.push_back(w);
      g.vocabulary.push_back({w, {}});
    }
  }
  return g;
}

std::size_t sentence_target(const TaskSpec& spec, Rng& rng) {
  const auto lo = static_cast<std::size_t>(std::max(2.0, std::round(spec.avg_sentence_length * 0.5)));
  const auto hi = static_cast<std::size_t>(std::round(spec.avg_sentence_length * 1.5));
  return lo + static_cast<std::size_t>(rng.below(std::max<std::size_t>(1, hi - lo + 1)));
}

Sentence span_sentence(const TaskSpec& spec, const Grammar& g, Rng& rng) {
  const std::size_t target = sentence_target(spec, rng);
  const std::size_t types = spec.label_types.size();
  Sentence s;
  std::vector<codec::Segment> segments;
  while (s.tokens.size() < target) {
    if (rng.bernoulli(kEntityRate)) {
      const auto k = static_cast<std::size_t>(rng.below(types));
      if (rng.bernoulli(kTriggerRate))
        s.tokens.push_back(g.triggers[k][rng.below(g.triggers[k].size())]);
      const double r = rng.uniform();
      const std::size_t len = r < 0.6 ? 1 : (r < 0.9 ? 2 : 3);
      const std::size_t start = s.tokens.size();
      for (std::size_t i = 0; i < len; ++i)
        s.tokens.push_back(g.lexicon[k][rng.below(g.lexicon[k].size())]);
      segments.push_back({start, start + len, spec.label_types[k]});
    } else {
      s.tokens.push_back(g.filler[rng.below(g.filler.size())]);
    }
  }
  for (auto& tok : s.tokens)
    if (rng.bernoulli(spec.noise_rate)) tok = g.ambiguous[rng.below(g.ambiguous.size())];
  s.tags = codec::encode_segments(segments, s.tokens.size(), codec::TagScheme::BIO);
  return s;
}

Sentence token_sentence(const TaskSpec& spec, const Grammar& g,
                        const std::vector<std::vector<double>>& transition, Rng& rng) {
  const std::size_t target = sentence_target(spec, rng);
  const std::size_t types = spec.label_types.size();
  Sentence s;
  std::size_t state = static_cast<std::size_t>(rng.below(types));
  for (std::size_t t = 0; t < target; ++t) {
    if (t > 0) {
      const double r = rng.uniform();
      double acc = 0.0;
      std::size_t next = types - 1;
      for (std::size_t k = 0; k < types; ++k) {
        acc += transition[state][k];
        if (r < acc) {
          next = k;
          break;
        }
      }
      state = next;
    }
    const auto& words = g.lexicon[state];
    std::string tok = words[rng.below(words.size())];
    if (rng.bernoulli(spec.noise_rate)) tok = g.ambiguous[rng.below(g.ambiguous.size())];
    s.tokens.push_back(std::move(tok));
    s.tags.push_back(spec.label_types[state]);
  }
  return s;
}

}  // namespace

TaskData generate(const TaskSpec& spec) {
  spec.validate();
  Rng grammar_rng = Rng::derive(spec.seed, 0x6772616d);  // "gram"
  Rng sentence_rng = Rng::derive(spec.seed, 0x73656e74);  // "sent"

  TaskData out;
  out.spec = spec;
  Grammar g = build_grammar(spec, grammar_rng);
  out.vocabulary = g.vocabulary;

  std::vector<std::vector<double>> transition;
  if (spec.kind == TaskKind::token_task) {
    const std::size_t types = spec.label_types.size();
    transition.assign(types, std::vector<double>(types));
    for (auto& row : transition) {
      double total = 0.0;
      for (auto& p : row) total += p = 0.05 + grammar_rng.uniform();
      for (auto& p : row) p /= total;
    }
  }

  std::vector<std::string> sorted_types = spec.label_types;
  std::sort(sorted_types.begin(), sorted_types.end());
  for (Corpus* c : {&out.train, &out.dev, &out.test}) {
    c->scheme = codec::TagScheme::BIO;
    c->label_inventory = sorted_types;
  }

  const std::size_t wanted = spec.train_size + spec.dev_size + spec.test_size;
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  std::size_t produced = 0;
  while (produced < wanted) {
    if (++attempts > 100 * wanted + 1000)
      throw InvalidInput("cannot generate enough distinct sentences for this task spec");
    Sentence s = spec.kind == TaskKind::span_task ? span_sentence(spec, g, sentence_rng)
                                                  : token_sentence(spec, g, transition, sentence_rng);
    std::string key;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) key += s.tokens[i] + '\x1f' + s.tags[i] + '\x1e';
    if (!seen.insert(key).second) continue;
    Corpus& target = produced < spec.train_size                   ? out.train
                     : produced < spec.train_size + spec.dev_size ? out.dev
                                                                  : out.test;
    target.sentences.push_back(std::move(s));
    ++produced;
  }
  return out;
}

Corpus convert_corpus(const Corpus& corpus, codec::TagScheme scheme, TaskKind kind) {
  if (kind == TaskKind::token_task || corpus.scheme == scheme) return corpus;
  Corpus out = corpus;
  out.scheme = scheme;
  for (auto& s : out.sentences) s.tags = codec::convert_scheme(s.tags, corpus.scheme, scheme);
  return out;
}

}  // namespace seedlab::data
