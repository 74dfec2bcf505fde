#include "seedlab/nn/gradients.hpp"

#include <algorithm>
#include <cmath>

#include "seedlab/error.hpp"

namespace seedlab::nn {

void clip_gradients(std::span<Parameter* const> params, double threshold) {
  if (!(threshold > 0.0)) throw InvalidInput("gradient clipping threshold must be positive");
  for (Parameter* p : params)
    for (auto& g : p->grad.values()) g = std::clamp(g, -threshold, threshold);
}

double global_grad_norm(std::span<Parameter* const> params) {
  double ss = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.values()) ss += g * g;
  return std::sqrt(ss);
}

double normalize_gradients(std::span<Parameter* const> params, double threshold) {
  if (!(threshold > 0.0)) throw InvalidInput("gradient normalization threshold must be positive");
  const double norm = global_grad_norm(params);
  if (norm > threshold) {
    const double scale = threshold / norm;
    for (Parameter* p : params)
      for (auto& g : p->grad.values()) g *= scale;
  }
  return norm;
}

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

}  // namespace seedlab::nn
