#include "seedlab/nn/char_encoders.hpp"

#include <cmath>
#include <limits>

#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::nn {

namespace {

int clamp_char(int id, std::size_t alphabet) noexcept {
  return id < 0 || static_cast<std::size_t>(id) >= alphabet ? kCharUnk : id;
}

Tensor embedding_rows(const Parameter& table, std::span<const int> ids) {
  const std::size_t dim = table.value.cols();
  Tensor out(ids.size(), dim);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = table.value.row(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

CharCnnParams make_char_cnn(const std::string& name, std::size_t alphabet, std::size_t char_dim,
                            std::size_t filters, Rng& rng) {
  if (alphabet <= static_cast<std::size_t>(kCharUnk))
    throw InvalidInput("character alphabet must include pad and unk");
  CharCnnParams p;
  p.char_dim = char_dim;
  p.filters = filters;
  p.embedding = Parameter(name + ".embedding", glorot_init({alphabet, char_dim}, rng));
  p.kernel = Parameter(name + ".kernel", glorot_init({filters, char_dim, 3}, rng));
  // Stored as [F, 3E]: window offset k occupies columns [k*E, (k+1)*E).
  p.kernel.value = [&] {
    Tensor t(filters, 3 * char_dim);
    std::copy(p.kernel.value.values().begin(), p.kernel.value.values().end(), t.values().begin());
    return t;
  }();
  p.kernel.grad = Tensor(filters, 3 * char_dim);
  p.bias = Parameter(name + ".bias", Tensor({filters}));
  return p;
}

std::vector<double> char_cnn_encode(const CharCnnParams& params, std::span<const int> word,
                                    CharCnnTrace* trace) {
  if (word.empty()) throw InvalidInput("character encoder needs a non-empty word");
  const std::size_t alphabet = params.embedding.value.rows();
  const std::size_t e = params.char_dim;
  std::vector<int> padded;
  padded.reserve(word.size() + 2);
  padded.push_back(kCharPad);
  for (int id : word) padded.push_back(clamp_char(id, alphabet));
  padded.push_back(kCharPad);
  const std::size_t windows = padded.size() - 2;

  std::vector<double> best(params.filters, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> argmax(params.filters, 0);
  for (std::size_t p = 0; p < windows; ++p) {
    for (std::size_t f = 0; f < params.filters; ++f) {
      const double* kf = params.kernel.value.row(f).data();
      double acc = params.bias.value[f];
      for (std::size_t k = 0; k < 3; ++k) {
        const double* emb = params.embedding.value.row(static_cast<std::size_t>(padded[p + k])).data();
        for (std::size_t c = 0; c < e; ++c) acc += kf[k * e + c] * emb[c];
      }
      if (acc > best[f]) {
        best[f] = acc;
        argmax[f] = p;
      }
    }
  }
  std::vector<double> out(params.filters);
  for (std::size_t f = 0; f < params.filters; ++f) out[f] = std::tanh(best[f]);
  if (trace) {
    trace->padded = std::move(padded);
    trace->argmax = std::move(argmax);
    trace->output = out;
  }
  return out;
}

void char_cnn_backward(CharCnnParams& params, const CharCnnTrace& trace,
                       std::span<const double> d_output) {
  const std::size_t e = params.char_dim;
  for (std::size_t f = 0; f < params.filters; ++f) {
    const double d = d_output[f] * (1.0 - trace.output[f] * trace.output[f]);
    if (d == 0.0) continue;
    params.bias.grad[f] += d;
    double* dk = params.kernel.grad.row(f).data();
    const double* kf = params.kernel.value.row(f).data();
    const std::size_t p = trace.argmax[f];
    for (std::size_t k = 0; k < 3; ++k) {
      const auto id = static_cast<std::size_t>(trace.padded[p + k]);
      const double* emb = params.embedding.value.row(id).data();
      double* demb = params.embedding.grad.row(id).data();
      for (std::size_t c = 0; c < e; ++c) {
        dk[k * e + c] += d * emb[c];
        demb[c] += d * kf[k * e + c];
      }
    }
  }
}

CharLstmParams make_char_lstm(const std::string& name, std::size_t alphabet, std::size_t char_dim,
                              std::size_t units, Rng& rng) {
  if (alphabet <= static_cast<std::size_t>(kCharUnk))
    throw InvalidInput("character alphabet must include pad and unk");
  CharLstmParams p;
  p.char_dim = char_dim;
  p.embedding = Parameter(name + ".embedding", glorot_init({alphabet, char_dim}, rng));
  p.forward = make_lstm_params(name + ".fw", char_dim, units, rng);
  p.backward = make_lstm_params(name + ".bw", char_dim, units, rng);
  return p;
}

std::vector<double> char_lstm_encode(const CharLstmParams& params, std::span<const int> word,
                                     CharLstmTrace* trace) {
  if (word.empty()) throw InvalidInput("character encoder needs a non-empty word");
  const std::size_t alphabet = params.embedding.value.rows();
  std::vector<int> ids;
  ids.reserve(word.size());
  for (int id : word) ids.push_back(clamp_char(id, alphabet));

  const Tensor x = embedding_rows(params.embedding, ids);
  const DropoutMasks none{};
  const Tensor fw = lstm_forward(params.forward, x, false, none, trace ? &trace->forward : nullptr);
  const Tensor bw = lstm_forward(params.backward, x, true, none, trace ? &trace->backward : nullptr);

  const std::size_t h = params.forward.units;
  std::vector<double> out(2 * h);
  const auto last = fw.row(ids.size() - 1);
  const auto first = bw.row(0);
  std::copy(last.begin(), last.end(), out.begin());
  std::copy(first.begin(), first.end(), out.begin() + static_cast<std::ptrdiff_t>(h));
  if (trace) trace->ids = std::move(ids);
  return out;
}

void char_lstm_backward(CharLstmParams& params, const CharLstmTrace& trace,
                        std::span<const double> d_output) {
  const std::size_t n = trace.ids.size();
  const std::size_t h = params.forward.units;
  Tensor d_fw(n, h);
  Tensor d_bw(n, h);
  for (std::size_t j = 0; j < h; ++j) {
    d_fw.at(n - 1, j) = d_output[j];
    d_bw.at(0, j) = d_output[h + j];
  }
  const Tensor dx_fw = lstm_backward(params.forward, trace.forward, d_fw);
  const Tensor dx_bw = lstm_backward(params.backward, trace.backward, d_bw);
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = params.embedding.grad.row(static_cast<std::size_t>(trace.ids[i]));
    const auto a = dx_fw.row(i);
    const auto b = dx_bw.row(i);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += a[c] + b[c];
  }
}

}  // namespace seedlab::nn
