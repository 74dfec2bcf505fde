#include "seedlab/nn/crf.hpp"

#include <cmath>
#include <limits>

#include "seedlab/error.hpp"

namespace seedlab::nn {

namespace {

double log_sum_exp(std::span<const double> v) noexcept {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

void check_shapes(const Tensor& emissions, const Tensor& transitions) {
  const std::size_t labels = emissions.cols();
  if (emissions.rows() == 0) throw InvalidInput("CRF over an empty sequence");
  if (transitions.rows() != labels + 2 || transitions.cols() != labels + 2)
    throw InvalidInput("CRF transition matrix must be [L+2, L+2]");
}

// alpha(t, j): log-sum of all prefixes ending in j at t, emissions included.
Tensor forward_lattice(const Tensor& e, const Tensor& tr) {
  const std::size_t steps = e.rows();
  const std::size_t labels = e.cols();
  const std::size_t start = labels;
  Tensor alpha(steps, labels);
  for (std::size_t j = 0; j < labels; ++j) alpha.at(0, j) = tr.at(start, j) + e.at(0, j);
  std::vector<double> scratch(labels);
  for (std::size_t t = 1; t < steps; ++t) {
    for (std::size_t j = 0; j < labels; ++j) {
      for (std::size_t i = 0; i < labels; ++i) scratch[i] = alpha.at(t - 1, i) + tr.at(i, j);
      alpha.at(t, j) = log_sum_exp(scratch) + e.at(t, j);
    }
  }
  return alpha;
}

// beta(t, i): log-sum of all suffixes after t given state i at t, end transition included.
Tensor backward_lattice(const Tensor& e, const Tensor& tr) {
  const std::size_t steps = e.rows();
  const std::size_t labels = e.cols();
  const std::size_t end = labels + 1;
  Tensor beta(steps, labels);
  for (std::size_t i = 0; i < labels; ++i) beta.at(steps - 1, i) = tr.at(i, end);
  std::vector<double> scratch(labels);
  for (std::size_t t = steps - 1; t-- > 0;) {
    for (std::size_t i = 0; i < labels; ++i) {
      for (std::size_t j = 0; j < labels; ++j)
        scratch[j] = tr.at(i, j) + e.at(t + 1, j) + beta.at(t + 1, j);
      beta.at(t, i) = log_sum_exp(scratch);
    }
  }
  return beta;
}

}  // namespace

CrfParams make_crf(const std::string& name, std::size_t labels) {
  if (labels == 0) throw InvalidInput("CRF needs at least one label");
  CrfParams p;
  p.labels = labels;
  p.transitions = Parameter(name + ".transitions", Tensor(labels + 2, labels + 2));
  return p;
}

double crf_path_score(const Tensor& emissions, const Tensor& transitions, std::span<const int> path) {
  check_shapes(emissions, transitions);
  const std::size_t labels = emissions.cols();
  if (path.size() != emissions.rows()) throw InvalidInput("CRF path length mismatch");
  for (int y : path)
    if (y < 0 || static_cast<std::size_t>(y) >= labels) throw InvalidInput("CRF label out of range");
  const auto y = [&](std::size_t t) { return static_cast<std::size_t>(path[t]); };
  double s = transitions.at(labels, y(0)) + emissions.at(0, y(0));
  for (std::size_t t = 1; t < path.size(); ++t)
    s += transitions.at(y(t - 1), y(t)) + emissions.at(t, y(t));
  s += transitions.at(y(path.size() - 1), labels + 1);
  return s;
}

double crf_log_partition(const Tensor& emissions, const Tensor& transitions) {
  check_shapes(emissions, transitions);
  const std::size_t labels = emissions.cols();
  const Tensor alpha = forward_lattice(emissions, transitions);
  std::vector<double> last(labels);
  for (std::size_t j = 0; j < labels; ++j)
    last[j] = alpha.at(emissions.rows() - 1, j) + transitions.at(j, labels + 1);
  return log_sum_exp(last);
}

CrfLoss crf_nll(const Tensor& emissions, const Tensor& transitions, std::span<const int> gold) {
  check_shapes(emissions, transitions);
  const std::size_t steps = emissions.rows();
  const std::size_t labels = emissions.cols();
  const std::size_t start = labels;
  const std::size_t end = labels + 1;

  const Tensor alpha = forward_lattice(emissions, transitions);
  const Tensor beta = backward_lattice(emissions, transitions);
  std::vector<double> last(labels);
  for (std::size_t j = 0; j < labels; ++j) last[j] = alpha.at(steps - 1, j) + beta.at(steps - 1, j);
  const double log_z = log_sum_exp(last);

  CrfLoss out{log_z - crf_path_score(emissions, transitions, gold), Tensor(steps, labels),
              Tensor(labels + 2, labels + 2)};

  // Expected counts under the model minus the gold path counts.
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t j = 0; j < labels; ++j)
      out.d_emissions.at(t, j) = std::exp(alpha.at(t, j) + beta.at(t, j) - log_z);
  for (std::size_t j = 0; j < labels; ++j) {
    out.d_transitions.at(start, j) = out.d_emissions.at(0, j);
    out.d_transitions.at(j, end) = out.d_emissions.at(steps - 1, j);
  }
  for (std::size_t t = 0; t + 1 < steps; ++t)
    for (std::size_t i = 0; i < labels; ++i)
      for (std::size_t j = 0; j < labels; ++j)
        out.d_transitions.at(i, j) += std::exp(alpha.at(t, i) + transitions.at(i, j) +
                                               emissions.at(t + 1, j) + beta.at(t + 1, j) - log_z);

  const auto y = [&](std::size_t t) { return static_cast<std::size_t>(gold[t]); };
  for (std::size_t t = 0; t < steps; ++t) out.d_emissions.at(t, y(t)) -= 1.0;
  out.d_transitions.at(start, y(0)) -= 1.0;
  out.d_transitions.at(y(steps - 1), end) -= 1.0;
  for (std::size_t t = 1; t < steps; ++t) out.d_transitions.at(y(t - 1), y(t)) -= 1.0;
  return out;
}

std::vector<int> crf_viterbi(const Tensor& emissions, const Tensor& transitions) {
  check_shapes(emissions, transitions);
  const std::size_t steps = emissions.rows();
  const std::size_t labels = emissions.cols();
  std::vector<double> score(labels);
  std::vector<double> next(labels);
  std::vector<int> back(steps * labels, 0);
  for (std::size_t j = 0; j < labels; ++j) score[j] = transitions.at(labels, j) + emissions.at(0, j);
  for (std::size_t t = 1; t < steps; ++t) {
    for (std::size_t j = 0; j < labels; ++j) {
      std::size_t best_i = 0;
      double best = score[0] + transitions.at(0, j);
      for (std::size_t i = 1; i < labels; ++i) {
        const double s = score[i] + transitions.at(i, j);
        if (s > best) {
          best = s;
          best_i = i;
        }
      }
      next[j] = best + emissions.at(t, j);
      back[t * labels + j] = static_cast<int>(best_i);
    }
    std::swap(score, next);
  }
  std::size_t best_last = 0;
  double best = score[0] + transitions.at(0, labels + 1);
  for (std::size_t j = 1; j < labels; ++j) {
    const double s = score[j] + transitions.at(j, labels + 1);
    if (s > best) {
      best = s;
      best_last = j;
    }
  }
  std::vector<int> path(steps);
  path[steps - 1] = static_cast<int>(best_last);
  for (std::size_t t = steps - 1; t > 0; --t)
    path[t - 1] = back[t * labels + static_cast<std::size_t>(path[t])];
  return path;
}

}  // namespace seedlab::nn
