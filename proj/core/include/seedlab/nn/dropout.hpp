#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace seedlab {
class Rng;
}

namespace seedlab::nn {

enum class DropoutMode { none, naive, variational };

std::string_view dropout_mode_name(DropoutMode mode) noexcept;
DropoutMode parse_dropout_mode(std::string_view name);

// Inverted-dropout masks for one LSTM direction over one sequence.
// Entries are 0 or 1/(1-rate). Empty vectors mean "no mask here".
//  naive:       a fresh output mask per timestep, nothing on the recurrence.
//  variational: one input mask and one recurrent mask shared by all timesteps.
struct DropoutMasks {
  std::size_t steps = 0;
  std::size_t input_dim = 0;
  std::size_t units = 0;
  std::vector<double> input;      // [input_dim]
  std::vector<double> recurrent;  // [units]
  std::vector<double> output;     // [steps * units]

  const double* input_at(std::size_t /*t*/) const noexcept {
    return input.empty() ? nullptr : input.data();
  }
  const double* recurrent_at(std::size_t /*t*/) const noexcept {
    return recurrent.empty() ? nullptr : recurrent.data();
  }
  const double* output_at(std::size_t t) const noexcept {
    return output.empty() ? nullptr : output.data() + t * units;
  }
  bool identity() const noexcept { return input.empty() && recurrent.empty() && output.empty(); }
};

// Rate must lie in [0, 1); rate 0 or mode none gives the identity mask set.
DropoutMasks dropout_masks(DropoutMode mode, double rate, std::size_t steps,
                           std::size_t input_dim, std::size_t units, Rng& rng);

}  // namespace seedlab::nn
