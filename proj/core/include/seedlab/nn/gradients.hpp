#pragma once

#include <span>

#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn {

// Clamp every gradient component to [-threshold, threshold].
void clip_gradients(std::span<Parameter* const> params, double threshold);

// Rescale all gradients by threshold/||g|| when the global L2 norm ||g|| of
// their concatenation exceeds threshold. Returns the norm before rescaling.
double normalize_gradients(std::span<Parameter* const> params, double threshold);

double global_grad_norm(std::span<Parameter* const> params);
void zero_grads(std::span<Parameter* const> params);

}  // namespace seedlab::nn
