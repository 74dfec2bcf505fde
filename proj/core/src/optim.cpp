#include "seedlab/optim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "seedlab/error.hpp"

namespace seedlab::optim {

std::string_view optimizer_name(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::SGD:
      return "sgd";
    case OptimizerKind::Adagrad:
      return "adagrad";
    case OptimizerKind::Adadelta:
      return "adadelta";
    case OptimizerKind::RMSProp:
      return "rmsprop";
    case OptimizerKind::Adam:
      return "adam";
    case OptimizerKind::Nadam:
      return "nadam";
  }
  return "nadam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  for (auto kind : {OptimizerKind::SGD, OptimizerKind::Adagrad, OptimizerKind::Adadelta,
                    OptimizerKind::RMSProp, OptimizerKind::Adam, OptimizerKind::Nadam}) {
    std::string lowered(name);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == optimizer_name(kind)) return kind;
  }
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

OptimizerConfig OptimizerConfig::defaults(OptimizerKind kind) {
  OptimizerConfig c;
  c.kind = kind;
  switch (kind) {
    case OptimizerKind::SGD:
      c.learning_rate = 0.1;
      break;
    case OptimizerKind::Adagrad:
      c.learning_rate = 0.05;
      break;
    case OptimizerKind::Adadelta:
      c.learning_rate = 1.0;
      c.rho = 0.95;
      c.epsilon = 1e-6;
      break;
    case OptimizerKind::RMSProp:
      c.learning_rate = 0.001;
      c.rho = 0.9;
      break;
    case OptimizerKind::Adam:
      c.learning_rate = 0.001;
      break;
    case OptimizerKind::Nadam:
      c.learning_rate = 0.002;
      break;
  }
  return c;
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(rho)) throw ConfigError("rho must lie in (0, 1)");
  if (!unit(beta1) || !unit(beta2)) throw ConfigError("beta1/beta2 must lie in (0, 1)");
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::bind(std::span<nn::Parameter* const> params) {
  slots_.clear();
  slots_.reserve(params.size());
  const bool two_slots = config_.kind != OptimizerKind::SGD && config_.kind != OptimizerKind::Adagrad &&
                         config_.kind != OptimizerKind::RMSProp;
  for (const nn::Parameter* p : params) {
    Slots s;
    if (config_.kind != OptimizerKind::SGD) s.first.assign(p->value.size(), 0.0);
    if (two_slots) s.second.assign(p->value.size(), 0.0);
    slots_.push_back(std::move(s));
  }
  step_ = 0;
  bound_ = true;
}

void Optimizer::reset() noexcept {
  for (auto& s : slots_) {
    std::fill(s.first.begin(), s.first.end(), 0.0);
    std::fill(s.second.begin(), s.second.end(), 0.0);
  }
  step_ = 0;
}

void Optimizer::apply(std::span<nn::Parameter* const> params) {
  if (!bound_) throw InvalidInput("optimizer state is not initialized");
  if (params.size() != slots_.size()) throw InvalidInput("optimizer bound to a different parameter list");
  ++step_;
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  const double t = static_cast<double>(step_);

  for (std::size_t k = 0; k < params.size(); ++k) {
    auto w = params[k]->value.values();
    const auto g = params[k]->grad.values();
    auto& s = slots_[k];
    if (config_.kind != OptimizerKind::SGD && s.first.size() != w.size())
      throw InvalidInput("optimizer slot shape mismatch for " + params[k]->name);

    switch (config_.kind) {
      case OptimizerKind::SGD:
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
        break;
      case OptimizerKind::Adagrad:
        for (std::size_t i = 0; i < w.size(); ++i) {
          s.first[i] += g[i] * g[i];
          w[i] -= lr * g[i] / (std::sqrt(s.first[i]) + eps);
        }
        break;
      case OptimizerKind::Adadelta: {
        const double rho = config_.rho;
        for (std::size_t i = 0; i < w.size(); ++i) {
          s.first[i] = rho * s.first[i] + (1.0 - rho) * g[i] * g[i];
          const double delta = -std::sqrt(s.second[i] + eps) / std::sqrt(s.first[i] + eps) * g[i];
          s.second[i] = rho * s.second[i] + (1.0 - rho) * delta * delta;
          w[i] += lr * delta;
        }
        break;
      }
      case OptimizerKind::RMSProp: {
        const double rho = config_.rho;
        for (std::size_t i = 0; i < w.size(); ++i) {
          s.first[i] = rho * s.first[i] + (1.0 - rho) * g[i] * g[i];
          w[i] -= lr * g[i] / (std::sqrt(s.first[i]) + eps);
        }
        break;
      }
      case OptimizerKind::Adam:
      case OptimizerKind::Nadam: {
        const double b1 = config_.beta1;
        const double b2 = config_.beta2;
        const double bc1 = 1.0 - std::pow(b1, t);
        const double bc1_next = 1.0 - std::pow(b1, t + 1.0);
        const double bc2 = 1.0 - std::pow(b2, t);
        const bool look_ahead = config_.kind == OptimizerKind::Nadam && config_.nesterov;
        for (std::size_t i = 0; i < w.size(); ++i) {
          s.first[i] = b1 * s.first[i] + (1.0 - b1) * g[i];
          s.second[i] = b2 * s.second[i] + (1.0 - b2) * g[i] * g[i];
          const double m_hat = look_ahead
                                   ? b1 * s.first[i] / bc1_next + (1.0 - b1) * g[i] / bc1
                                   : s.first[i] / bc1;
          const double v_hat = s.second[i] / bc2;
          w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
        break;
      }
    }
  }
}

}  // namespace seedlab::optim
