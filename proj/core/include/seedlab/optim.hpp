#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "seedlab/nn/tensor.hpp"

namespace seedlab::optim {

enum class OptimizerKind { SGD, Adagrad, Adadelta, RMSProp, Adam, Nadam };

std::string_view optimizer_name(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer(std::string_view name);

// rho is the decay constant of Adadelta/RMSProp; beta1/beta2 belong to Adam/Nadam.
struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Nadam;
  double learning_rate = 0.002;
  double rho = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Nadam only: when false the look-ahead term is dropped and Nadam reduces to Adam.
  bool nesterov = true;

  static OptimizerConfig defaults(OptimizerKind kind);
  // Throws ConfigError when a field is outside its domain.
  void validate() const;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// Per-parameter slots plus the step counter.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  const OptimizerConfig& config() const noexcept { return config_; }
  std::uint64_t step() const noexcept { return step_; }
  bool bound() const noexcept { return bound_; }

  // Allocates zeroed slots shaped like the given parameters.
  void bind(std::span<nn::Parameter* const> params);
  // One update from the gradients currently in params; throws InvalidInput if unbound
  // or the parameter list does not match the bound shapes.
  void apply(std::span<nn::Parameter* const> params);
  // Zeroes every slot and the step counter; bindings are kept.
  void reset() noexcept;

 private:
  struct Slots {
    std::vector<double> first;
    std::vector<double> second;
  };

  OptimizerConfig config_;
  std::vector<Slots> slots_;
  std::uint64_t step_ = 0;
  bool bound_ = false;
};

}  // namespace seedlab::optim
