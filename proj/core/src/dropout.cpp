#include "seedlab/nn/dropout.hpp"

#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::nn {

std::string_view dropout_mode_name(DropoutMode mode) noexcept {
  switch (mode) {
    case DropoutMode::naive:
      return "naive";
    case DropoutMode::variational:
      return "variational";
    default:
      return "none";
  }
}

DropoutMode parse_dropout_mode(std::string_view name) {
  if (name == "none") return DropoutMode::none;
  if (name == "naive") return DropoutMode::naive;
  if (name == "variational") return DropoutMode::variational;
  throw ConfigError("unknown dropout mode '" + std::string(name) + "'");
}

namespace {

std::vector<double> bernoulli_mask(std::size_t n, double rate, Rng& rng) {
  const double scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(n);
  for (auto& m : mask) m = rng.uniform() < rate ? 0.0 : scale;
  return mask;
}

}  // namespace

DropoutMasks dropout_masks(DropoutMode mode, double rate, std::size_t steps,
                           std::size_t input_dim, std::size_t units, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("dropout rate must lie in [0, 1)");
  DropoutMasks masks{steps, input_dim, units, {}, {}, {}};
  if (mode == DropoutMode::none || rate == 0.0) return masks;
  if (mode == DropoutMode::naive) {
    masks.output = bernoulli_mask(steps * units, rate, rng);
  } else {
    masks.input = bernoulli_mask(input_dim, rate, rng);
    masks.recurrent = bernoulli_mask(units, rate, rng);
  }
  return masks;
}

}  // namespace seedlab::nn
