#include "seedlab/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::stats {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, 0.5);
}

ScoreSummary summarize(std::span<const double> scores) {
  if (scores.empty()) throw InvalidInput("summarize of an empty score list");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());

  ScoreSummary s;
  s.n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.p95 = quantile_sorted(sorted, 0.95);
  // Summation over the sorted copy keeps mean and sd permutation invariant.
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

namespace {

struct SignedCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

double f1_of(const SignedCounts& c) noexcept {
  const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom <= 0) return 0.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

// Tolerance for "statistic >= observed": mathematically equal differences of
// two rationals may round to neighbouring doubles.
constexpr double kTieTolerance = 1e-12;

struct SwapProblem {
  SignedCounts total_a;
  SignedCounts total_b;
  std::vector<SignedCounts> delta;  // b_i - a_i
  double observed = 0.0;

  double statistic_with(const SignedCounts& shift) const noexcept {
    SignedCounts sa{total_a.tp + shift.tp, total_a.fp + shift.fp, total_a.fn + shift.fn};
    SignedCounts sb{total_b.tp - shift.tp, total_b.fp - shift.fp, total_b.fn - shift.fn};
    return std::fabs(f1_of(sa) - f1_of(sb));
  }
};

SwapProblem make_problem(std::span<const score::MatchCounts> a,
                         std::span<const score::MatchCounts> b) {
  if (a.size() != b.size()) throw InvalidInput("randomization test needs equal sentence counts");
  SwapProblem p;
  p.delta.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const SignedCounts ai{static_cast<std::int64_t>(a[i].tp), static_cast<std::int64_t>(a[i].fp),
                          static_cast<std::int64_t>(a[i].fn)};
    const SignedCounts bi{static_cast<std::int64_t>(b[i].tp), static_cast<std::int64_t>(b[i].fp),
                          static_cast<std::int64_t>(b[i].fn)};
    p.total_a.tp += ai.tp;
    p.total_a.fp += ai.fp;
    p.total_a.fn += ai.fn;
    p.total_b.tp += bi.tp;
    p.total_b.fp += bi.fp;
    p.total_b.fn += bi.fn;
    p.delta.push_back({bi.tp - ai.tp, bi.fp - ai.fp, bi.fn - ai.fn});
  }
  p.observed = p.statistic_with({});
  return p;
}

}  // namespace

TestResult approx_randomization_test(std::span<const score::MatchCounts> a,
                                     std::span<const score::MatchCounts> b,
                                     std::uint64_t iterations, std::uint64_t seed) {
  if (iterations == 0) throw InvalidInput("randomization test needs at least one iteration");
  const SwapProblem problem = make_problem(a, b);
  const std::size_t n = problem.delta.size();
  Rng rng(seed);

  std::uint64_t at_least = 0;
  for (std::uint64_t r = 0; r < iterations; ++r) {
    SignedCounts shift;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next_u64();
      if (bits & 1U) {
        shift.tp += problem.delta[i].tp;
        shift.fp += problem.delta[i].fp;
        shift.fn += problem.delta[i].fn;
      }
      bits >>= 1U;
    }
    at_least += problem.statistic_with(shift) >= problem.observed - kTieTolerance;
  }
  return {problem.observed,
          static_cast<double>(at_least + 1) / static_cast<double>(iterations + 1),
          TestMethod::randomization};
}

TestResult exact_randomization_test(std::span<const score::MatchCounts> a,
                                    std::span<const score::MatchCounts> b) {
  if (a.size() > kMaxExactSentences)
    throw InvalidInput("exact randomization test limited to " +
                       std::to_string(kMaxExactSentences) + " sentences");
  const SwapProblem problem = make_problem(a, b);
  const std::size_t n = problem.delta.size();
  const std::uint64_t patterns = std::uint64_t{1} << n;

  std::uint64_t at_least = 0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    SignedCounts shift;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) {
        shift.tp += problem.delta[i].tp;
        shift.fp += problem.delta[i].fp;
        shift.fn += problem.delta[i].fn;
      }
    }
    at_least += problem.statistic_with(shift) >= problem.observed - kTieTolerance;
  }
  return {problem.observed, static_cast<double>(at_least) / static_cast<double>(patterns),
          TestMethod::randomization};
}

double bonferroni(double p, std::uint64_t comparisons) {
  if (comparisons == 0) throw InvalidInput("Bonferroni correction with zero comparisons");
  return std::min(1.0, p * static_cast<double>(comparisons));
}

double ks_survival(double lambda) {
  if (!(lambda > 1e-6)) return 1.0;
  const double two_l2 = 2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 1000000; ++k) {
    const double term = sign * std::exp(-two_l2 * static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::fabs(term) < 1e-10) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InvalidInput("KS test needs two nonempty samples");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const auto n = static_cast<double>(xs.size());
  const auto m = static_cast<double>(ys.size());

  // Walk the merged support; both ECDFs are evaluated after consuming every
  // copy of the current value so that ties are handled as steps.
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double v;
    if (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j]))
      v = xs[i];
    else
      v = ys[j];
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double lambda = d * std::sqrt(n * m / (n + m));
  return {d, ks_survival(lambda), TestMethod::ks};
}

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double dm = m;
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

TestResult brown_forsythe(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw InvalidInput("Brown-Forsythe needs at least two groups");
  std::vector<std::vector<double>> z(groups.size());
  std::size_t total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) throw InvalidInput("Brown-Forsythe group with fewer than 2 values");
    const double med = median(groups[g]);
    z[g].reserve(groups[g].size());
    for (double v : groups[g]) z[g].push_back(std::fabs(v - med));
    total += groups[g].size();
  }

  std::vector<double> group_mean(z.size());
  double grand = 0.0;
  for (std::size_t g = 0; g < z.size(); ++g) {
    const double s = std::accumulate(z[g].begin(), z[g].end(), 0.0);
    group_mean[g] = s / static_cast<double>(z[g].size());
    grand += s;
  }
  grand /= static_cast<double>(total);

  double between = 0.0;
  double within = 0.0;
  for (std::size_t g = 0; g < z.size(); ++g) {
    const double diff = group_mean[g] - grand;
    between += static_cast<double>(z[g].size()) * diff * diff;
    for (double v : z[g]) within += (v - group_mean[g]) * (v - group_mean[g]);
  }

  const double df1 = static_cast<double>(z.size() - 1);
  const double df2 = static_cast<double>(total - z.size());
  double f = 0.0;
  if (within > 0.0) {
    f = (between / df1) / (within / df2);
  } else if (between > 0.0) {
    f = std::numeric_limits<double>::infinity();
  }
  return {f, f_survival(f, df1, df2), TestMethod::brown_forsythe};
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("correlation of vectors with different lengths");
  if (x.size() < 2) throw InvalidInput("correlation needs at least two points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidInput("correlation of a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("spearman of vectors with different lengths");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

PairedComparison paired_comparison(std::span<const double> a_scores,
                                   std::span<const double> b_scores) {
  if (a_scores.size() != b_scores.size())
    throw InvalidInput("paired comparison of unequal score lists");
  if (a_scores.empty()) throw InvalidInput("paired comparison of empty score lists");
  PairedComparison out;
  out.n_configs = a_scores.size();
  std::vector<double> diffs(a_scores.size());
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  for (std::size_t i = 0; i < a_scores.size(); ++i) {
    diffs[i] = a_scores[i] - b_scores[i];
    wins_a += a_scores[i] > b_scores[i];
    wins_b += b_scores[i] > a_scores[i];
  }
  const auto n = static_cast<double>(out.n_configs);
  out.win_rate_a = static_cast<double>(wins_a) / n;
  out.win_rate_b = static_cast<double>(wins_b) / n;
  out.tie_rate = static_cast<double>(out.n_configs - wins_a - wins_b) / n;
  out.delta_median = median(diffs);
  return out;
}

}  // namespace seedlab::stats
