#pragma once

#include <cstdint>
#include <span>

#include "seedlab/tagcodec.hpp"

namespace seedlab::score {

// Per-sentence decomposition of segment F1. Additive across sentences.
struct MatchCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& other) noexcept {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  friend MatchCounts operator+(MatchCounts a, const MatchCounts& b) noexcept { return a += b; }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// F1 as 2tp / (2tp + fp + fn), which equals 2pr/(p+r); 0 when the denominator is 0.
// The integer form is exact under swapping fp and fn.
double f1_score(const MatchCounts& counts) noexcept;
PRF prf(const MatchCounts& counts) noexcept;

double token_accuracy(std::span<const codec::TagSequence> gold,
                      std::span<const codec::TagSequence> pred);

MatchCounts sentence_counts(std::span<const std::string> gold, std::span<const std::string> pred,
                            codec::TagScheme scheme);

// Micro-averaged over the summed counts.
PRF corpus_prf(std::span<const MatchCounts> counts) noexcept;

// For token-level tasks: tp = correct tokens, fp = fn = wrong tokens, so that
// f1_score() of the counts is the token accuracy.
MatchCounts token_counts(std::span<const std::string> gold, std::span<const std::string> pred);

}  // namespace seedlab::score
