#pragma once

#include <span>
#include <string>
#include <vector>

#include "seedlab/nn/dropout.hpp"
#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn {

// Gate rows are stacked in the order input, forget, candidate, output.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t units = 0;
  Parameter wx;    // [4H, D]
  Parameter wh;    // [4H, H]
  Parameter bias;  // [4H]

  void collect(std::vector<Parameter*>& out) { out.insert(out.end(), {&wx, &wh, &bias}); }
};

// Glorot weights, zero bias except the forget gate which starts at 1.
LstmParams make_lstm_params(const std::string& name, std::size_t input_dim, std::size_t units,
                            Rng& rng);

struct StepMasks {
  const double* input = nullptr;      // [D]
  const double* recurrent = nullptr;  // [H], applied to h_prev
  const double* output = nullptr;     // [H], applied to the emitted h_t only
};

struct StepResult {
  std::vector<double> h;       // unmasked hidden state (fed to the recurrence)
  std::vector<double> c;
  std::vector<double> output;  // h with the output mask applied
};

// One forget-gate LSTM step, no peepholes:
//   i,f,o = sigmoid(.), g = tanh(.), c = f*c_prev + i*g, h = o*tanh(c).
StepResult lstm_step(const LstmParams& params, std::span<const double> x,
                     std::span<const double> h_prev, std::span<const double> c_prev,
                     const StepMasks& masks = {});

// Saved activations of a whole-sequence pass, needed by lstm_backward.
struct LstmTrace {
  bool reverse = false;
  Tensor x_masked;  // [T, D]
  Tensor gates;     // [T, 4H] post-activation
  Tensor cell;      // [T, H]
  Tensor hidden;    // [T, H] unmasked
  Tensor tanh_cell; // [T, H]
  DropoutMasks masks;
};

// Runs the cell over x ([T, D]) from zero state, left to right, or right to
// left when reverse is set. Row t of the output always belongs to input row t.
Tensor lstm_forward(const LstmParams& params, const Tensor& x, bool reverse,
                    const DropoutMasks& masks, LstmTrace* trace);

// Accumulates parameter gradients and returns d loss / d x.
Tensor lstm_backward(LstmParams& params, const LstmTrace& trace, const Tensor& d_output);

// ---- stacked bidirectional LSTM ------------------------------------------

struct BiLstmLayer {
  LstmParams forward;
  LstmParams backward;
};

struct BiLstmStack {
  std::vector<BiLstmLayer> layers;
  DropoutMode dropout = DropoutMode::none;
  double dropout_rate = 0.0;

  std::size_t output_dim() const noexcept {
    return layers.empty() ? 0 : 2 * layers.back().forward.units;
  }
  void collect(std::vector<Parameter*>& out);
};

BiLstmStack make_bilstm_stack(const std::string& name, std::size_t input_dim,
                              const std::vector<std::size_t>& units, DropoutMode dropout,
                              double rate, Rng& rng);

struct BiLstmTrace {
  std::vector<LstmTrace> forward;
  std::vector<LstmTrace> backward;
};

// Output [T, 2*units_last]: forward half then backward half per timestep.
// Masks are drawn from rng only in train mode; eval mode never touches rng.
Tensor bilstm_forward(const BiLstmStack& stack, const Tensor& inputs, bool train_mode, Rng& rng,
                      BiLstmTrace* trace);
Tensor bilstm_backward(BiLstmStack& stack, const BiLstmTrace& trace, const Tensor& d_output);

}  // namespace seedlab::nn
