#pragma once

#include <span>
#include <string>
#include <vector>

#include "seedlab/nn/lstm.hpp"
#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn {

inline constexpr int kCharPad = 0;
inline constexpr int kCharUnk = 1;

// Trigram CNN over character embeddings with max-pooling, then tanh.
// The word is padded with one pad symbol on each side.
struct CharCnnParams {
  std::size_t char_dim = 0;
  std::size_t filters = 0;
  Parameter embedding;  // [C, E]
  Parameter kernel;     // [F, 3E]
  Parameter bias;       // [F]

  std::size_t output_dim() const noexcept { return filters; }
  void collect(std::vector<Parameter*>& out) {
    out.insert(out.end(), {&embedding, &kernel, &bias});
  }
};

CharCnnParams make_char_cnn(const std::string& name, std::size_t alphabet, std::size_t char_dim,
                            std::size_t filters, Rng& rng);

struct CharCnnTrace {
  std::vector<int> padded;          // char ids including the pads
  std::vector<std::size_t> argmax;  // winning window per filter
  std::vector<double> output;       // tanh(max)
};

std::vector<double> char_cnn_encode(const CharCnnParams& params, std::span<const int> word,
                                    CharCnnTrace* trace);
void char_cnn_backward(CharCnnParams& params, const CharCnnTrace& trace,
                       std::span<const double> d_output);

// Single-layer character BiLSTM; output is [final forward h ; final backward h].
struct CharLstmParams {
  std::size_t char_dim = 0;
  Parameter embedding;  // [C, E]
  LstmParams forward;
  LstmParams backward;

  std::size_t output_dim() const noexcept { return 2 * forward.units; }
  void collect(std::vector<Parameter*>& out) {
    out.push_back(&embedding);
    forward.collect(out);
    backward.collect(out);
  }
};

CharLstmParams make_char_lstm(const std::string& name, std::size_t alphabet, std::size_t char_dim,
                              std::size_t units, Rng& rng);

struct CharLstmTrace {
  std::vector<int> ids;
  LstmTrace forward;
  LstmTrace backward;
};

std::vector<double> char_lstm_encode(const CharLstmParams& params, std::span<const int> word,
                                     CharLstmTrace* trace);
void char_lstm_backward(CharLstmParams& params, const CharLstmTrace& trace,
                        std::span<const double> d_output);

}  // namespace seedlab::nn
