#include "seedlab/scorer.hpp"

#include <algorithm>

#include "seedlab/error.hpp"

namespace seedlab::score {

double f1_score(const MatchCounts& counts) noexcept {
  const std::uint64_t denom = 2 * counts.tp + counts.fp + counts.fn;
  if (denom == 0) return 0.0;
  return static_cast<double>(2 * counts.tp) / static_cast<double>(denom);
}

PRF prf(const MatchCounts& counts) noexcept {
  PRF out;
  if (counts.tp + counts.fp > 0)
    out.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  if (counts.tp + counts.fn > 0)
    out.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  out.f1 = f1_score(counts);
  return out;
}

double token_accuracy(std::span<const codec::TagSequence> gold,
                      std::span<const codec::TagSequence> pred) {
  if (gold.size() != pred.size()) throw InvalidInput("sentence count mismatch");
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw InvalidInput("length mismatch in sentence " + std::to_string(s));
    total += gold[s].size();
    for (std::size_t i = 0; i < gold[s].size(); ++i) correct += gold[s][i] == pred[s][i];
  }
  if (total == 0) throw InvalidInput("token accuracy of an empty corpus");
  return static_cast<double>(correct) / static_cast<double>(total);
}

MatchCounts sentence_counts(std::span<const std::string> gold, std::span<const std::string> pred,
                            codec::TagScheme scheme) {
  if (gold.size() != pred.size()) throw InvalidInput("gold/pred length mismatch");
  const auto g = codec::decode_segments(gold, scheme);
  const auto p = codec::decode_segments(pred, scheme);
  // Both lists are sorted by start and non-overlapping, so a merge finds exact matches.
  std::uint64_t tp = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < g.size() && j < p.size()) {
    if (g[i].start < p[j].start) {
      ++i;
    } else if (p[j].start < g[i].start) {
      ++j;
    } else {
      tp += g[i].end == p[j].end && g[i].label == p[j].label;
      ++i;
      ++j;
    }
  }
  return {tp, p.size() - tp, g.size() - tp};
}

PRF corpus_prf(std::span<const MatchCounts> counts) noexcept {
  MatchCounts total;
  for (const auto& c : counts) total += c;
  return prf(total);
}

MatchCounts token_counts(std::span<const std::string> gold, std::span<const std::string> pred) {
  if (gold.size() != pred.size()) throw InvalidInput("gold/pred length mismatch");
  MatchCounts out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) {
      ++out.tp;
    } else {
      ++out.fp;
      ++out.fn;
    }
  }
  return out;
}

}  // namespace seedlab::score
