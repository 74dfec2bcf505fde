#include "seedlab/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::nn {

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
  const std::size_t count = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                                            std::multiplies<>());
  values_.assign(shape_.empty() ? 0 : count, fill);
}

void Tensor::fill(double v) noexcept { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double glorot_limit(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw InvalidInput("glorot_init needs at least one dimension");
  for (auto d : shape)
    if (d == 0) throw InvalidInput("glorot_init of a zero-sized shape");
  double fan_in;
  double fan_out;
  if (shape.size() == 1) {
    fan_in = fan_out = static_cast<double>(shape[0]);
  } else {
    double receptive = 1.0;
    for (std::size_t i = 2; i < shape.size(); ++i) receptive *= static_cast<double>(shape[i]);
    fan_out = static_cast<double>(shape[0]) * receptive;
    fan_in = static_cast<double>(shape[1]) * receptive;
  }
  return std::sqrt(6.0 / (fan_in + fan_out));
}

Tensor glorot_init(const std::vector<std::size_t>& shape, Rng& rng) {
  const double limit = glorot_limit(shape);
  Tensor t(shape);
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace seedlab::nn
