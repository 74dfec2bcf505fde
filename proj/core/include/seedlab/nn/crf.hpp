#pragma once

#include <span>
#include <string>
#include <vector>

#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn {

// Linear-chain CRF with the transition matrix augmented by two virtual
// states: index L is START and L+1 is END. transitions(i, j) scores moving
// from i to j. The START column and END row are never read.
struct CrfParams {
  std::size_t labels = 0;
  Parameter transitions;  // [L+2, L+2]

  std::size_t start() const noexcept { return labels; }
  std::size_t end() const noexcept { return labels + 1; }
  void collect(std::vector<Parameter*>& out) { out.push_back(&transitions); }
};

CrfParams make_crf(const std::string& name, std::size_t labels);

// Sum of start, emission, inner and end transition scores along a path.
double crf_path_score(const Tensor& emissions, const Tensor& transitions, std::span<const int> path);
// Forward algorithm in log space.
double crf_log_partition(const Tensor& emissions, const Tensor& transitions);

struct CrfLoss {
  double loss = 0.0;          // logZ - score(gold)
  Tensor d_emissions;         // [T, L]
  Tensor d_transitions;       // [L+2, L+2]
};

CrfLoss crf_nll(const Tensor& emissions, const Tensor& transitions, std::span<const int> gold);

// Best path including start/end transitions. Ties go to the lower label id
// both for back-pointers and for the final state.
std::vector<int> crf_viterbi(const Tensor& emissions, const Tensor& transitions);

}  // namespace seedlab::nn
