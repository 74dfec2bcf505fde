#pragma once

#include <span>
#include <string>
#include <vector>

#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn {

struct LinearParams {
  Parameter weight;  // [out, in]
  Parameter bias;    // [out]
  void collect(std::vector<Parameter*>& out) { out.insert(out.end(), {&weight, &bias}); }
};

LinearParams make_linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng);
// x [T, in] -> [T, out]
Tensor linear_forward(const LinearParams& params, const Tensor& x);
// Accumulates weight/bias gradients, returns d x.
Tensor linear_backward(LinearParams& params, const Tensor& x, const Tensor& d_output);

struct LossAndGrad {
  double loss = 0.0;
  Tensor grad;  // same shape as the scored input
};

// Mean per-token negative log softmax probability of the gold labels.
LossAndGrad softmax_nll(const Tensor& logits, std::span<const int> gold);
std::vector<int> argmax_rows(const Tensor& scores);

}  // namespace seedlab::nn
