#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seedlab/scorer.hpp"

namespace seedlab::stats {

struct ScoreSummary {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double sd = 0.0;   // sample standard deviation, 0 for n = 1
  double p95 = 0.0;
};

// Quantiles interpolate linearly between order statistics at position p*(n-1).
ScoreSummary summarize(std::span<const double> scores);
double quantile_sorted(std::span<const double> sorted, double p);
double median(std::span<const double> values);

enum class TestMethod { randomization, ks, brown_forsythe };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::randomization;
};

// Two-sided approximate randomization test on |F1(a) - F1(b)|.
// Each iteration swaps a_i and b_i with probability 1/2 per sentence;
// p = (c + 1) / (R + 1) with c the number of iterations whose statistic is
// at least the observed one (within 1e-12).
TestResult approx_randomization_test(std::span<const score::MatchCounts> a,
                                     std::span<const score::MatchCounts> b,
                                     std::uint64_t iterations, std::uint64_t seed);

// Full enumeration of the 2^n swap patterns; refuses n > 20.
TestResult exact_randomization_test(std::span<const score::MatchCounts> a,
                                    std::span<const score::MatchCounts> b);

inline constexpr std::size_t kMaxExactSentences = 20;

double bonferroni(double p, std::uint64_t comparisons);

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value series.
// Approximate for small samples (no continuity correction).
TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);
// Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), clamped to [0, 1].
double ks_survival(double lambda);

// Brown-Forsythe: one-way ANOVA on |x - median(group)|.
TestResult brown_forsythe(std::span<const std::vector<double>> groups);

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);
// P(F > f) for the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct PairedComparison {
  std::size_t n_configs = 0;
  double win_rate_a = 0.0;
  double win_rate_b = 0.0;
  double tie_rate = 0.0;
  double delta_median = 0.0;  // median of a_i - b_i
};

PairedComparison paired_comparison(std::span<const double> a_scores,
                                   std::span<const double> b_scores);

}  // namespace seedlab::stats
