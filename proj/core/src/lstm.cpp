#include "seedlab/nn/lstm.hpp"

#include <cmath>

#include "eigen_maps.hpp"
#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::nn {

using detail::as_matrix;
using detail::ConstMatrixMap;
using detail::RowMatrix;

namespace {

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams make_lstm_params(const std::string& name, std::size_t input_dim, std::size_t units,
                            Rng& rng) {
  if (input_dim == 0 || units == 0) throw InvalidInput("LSTM dimensions must be positive");
  LstmParams p;
  p.input_dim = input_dim;
  p.units = units;
  p.wx = Parameter(name + ".wx", glorot_init({4 * units, input_dim}, rng));
  p.wh = Parameter(name + ".wh", glorot_init({4 * units, units}, rng));
  Tensor bias({4 * units});
  for (std::size_t j = units; j < 2 * units; ++j) bias[j] = 1.0;
  p.bias = Parameter(name + ".bias", std::move(bias));
  return p;
}

StepResult lstm_step(const LstmParams& params, std::span<const double> x,
                     std::span<const double> h_prev, std::span<const double> c_prev,
                     const StepMasks& masks) {
  const std::size_t d = params.input_dim;
  const std::size_t h = params.units;
  if (x.size() != d || h_prev.size() != h || c_prev.size() != h)
    throw InvalidInput("lstm_step dimension mismatch");

  std::vector<double> pre(params.bias.value.values().begin(), params.bias.value.values().end());
  for (std::size_t r = 0; r < 4 * h; ++r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double xv = masks.input ? x[k] * masks.input[k] : x[k];
      acc += params.wx.value.at(r, k) * xv;
    }
    for (std::size_t k = 0; k < h; ++k) {
      const double hv = masks.recurrent ? h_prev[k] * masks.recurrent[k] : h_prev[k];
      acc += params.wh.value.at(r, k) * hv;
    }
    pre[r] += acc;
  }

  StepResult out;
  out.h.resize(h);
  out.c.resize(h);
  out.output.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double ig = sigmoid(pre[j]);
    const double fg = sigmoid(pre[h + j]);
    const double gg = std::tanh(pre[2 * h + j]);
    const double og = sigmoid(pre[3 * h + j]);
    out.c[j] = fg * c_prev[j] + ig * gg;
    out.h[j] = og * std::tanh(out.c[j]);
    out.output[j] = masks.output ? out.h[j] * masks.output[j] : out.h[j];
  }
  return out;
}

Tensor lstm_forward(const LstmParams& params, const Tensor& x, bool reverse,
                    const DropoutMasks& masks, LstmTrace* trace) {
  const std::size_t steps = x.rows();
  const std::size_t d = params.input_dim;
  const std::size_t h = params.units;
  if (steps == 0) throw InvalidInput("LSTM over an empty sequence");
  if (x.cols() != d) throw InvalidInput("LSTM input width does not match the layer");

  Tensor xm = x;
  if (const double* m = masks.input_at(0)) {
    for (std::size_t t = 0; t < steps; ++t) {
      auto row = xm.row(t);
      for (std::size_t k = 0; k < d; ++k) row[k] *= m[k];
    }
  }

  Tensor gates(steps, 4 * h);
  auto g = as_matrix(gates);
  g.noalias() = as_matrix(xm) * as_matrix(params.wx.value).transpose();
  g.rowwise() += detail::as_vector(params.bias.value).transpose();

  Tensor cell(steps, h);
  Tensor hidden(steps, h);
  Tensor tanh_cell(steps, h);
  Tensor output(steps, h);
  const auto wh = as_matrix(params.wh.value);
  Eigen::VectorXd h_in = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  Eigen::VectorXd rec(static_cast<Eigen::Index>(4 * h));
  std::vector<double> c_prev(h, 0.0);

  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t t = reverse ? steps - 1 - step : step;
    rec.noalias() = wh * h_in;
    double* gt = gates.row(t).data();
    for (std::size_t r = 0; r < 4 * h; ++r) gt[r] += rec[static_cast<Eigen::Index>(r)];
    double* ct = cell.row(t).data();
    double* ht = hidden.row(t).data();
    double* tc = tanh_cell.row(t).data();
    double* yt = output.row(t).data();
    const double* om = masks.output_at(t);
    const double* rm = masks.recurrent_at(t);
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = sigmoid(gt[j]);
      const double fg = sigmoid(gt[h + j]);
      const double gg = std::tanh(gt[2 * h + j]);
      const double og = sigmoid(gt[3 * h + j]);
      gt[j] = ig;
      gt[h + j] = fg;
      gt[2 * h + j] = gg;
      gt[3 * h + j] = og;
      ct[j] = fg * c_prev[j] + ig * gg;
      tc[j] = std::tanh(ct[j]);
      ht[j] = og * tc[j];
      yt[j] = om ? ht[j] * om[j] : ht[j];
      c_prev[j] = ct[j];
      h_in[static_cast<Eigen::Index>(j)] = rm ? ht[j] * rm[j] : ht[j];
    }
  }

  if (trace) {
    trace->reverse = reverse;
    trace->x_masked = std::move(xm);
    trace->gates = std::move(gates);
    trace->cell = std::move(cell);
    trace->hidden = std::move(hidden);
    trace->tanh_cell = std::move(tanh_cell);
    trace->masks = masks;
  }
  return output;
}

Tensor lstm_backward(LstmParams& params, const LstmTrace& trace, const Tensor& d_output) {
  const std::size_t steps = trace.hidden.rows();
  const std::size_t h = params.units;
  const std::size_t d = params.input_dim;
  if (d_output.rows() != steps || d_output.cols() != h)
    throw InvalidInput("LSTM backward gradient shape mismatch");

  const auto& masks = trace.masks;
  Tensor d_pre(steps, 4 * h);
  Tensor h_prev_masked(steps, h);  // row t: recurrent input used at step t
  const auto wh = as_matrix(params.wh.value);

  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  std::vector<double> dc_next(h, 0.0);
  Eigen::VectorXd dh_rec(static_cast<Eigen::Index>(h));

  for (std::size_t step = steps; step-- > 0;) {
    const std::size_t t = trace.reverse ? steps - 1 - step : step;
    const bool first = step == 0;
    const std::size_t t_prev = trace.reverse ? t + 1 : t - 1;  // only read when !first

    const double* gt = trace.gates.row(t).data();
    const double* tc = trace.tanh_cell.row(t).data();
    const double* om = masks.output_at(t);
    const double* rm = masks.recurrent_at(t);
    const double* dy = d_output.row(t).data();
    double* dp = d_pre.row(t).data();
    double* hp = h_prev_masked.row(t).data();

    for (std::size_t j = 0; j < h; ++j) {
      const double ig = gt[j];
      const double fg = gt[h + j];
      const double gg = gt[2 * h + j];
      const double og = gt[3 * h + j];
      const double c_prev = first ? 0.0 : trace.cell.at(t_prev, j);
      const double dh = (om ? dy[j] * om[j] : dy[j]) + dh_next[static_cast<Eigen::Index>(j)];
      const double d_o = dh * tc[j];
      const double dc = dh * og * (1.0 - tc[j] * tc[j]) + dc_next[j];
      const double d_i = dc * gg;
      const double d_g = dc * ig;
      const double d_f = dc * c_prev;
      dc_next[j] = dc * fg;
      dp[j] = d_i * ig * (1.0 - ig);
      dp[h + j] = d_f * fg * (1.0 - fg);
      dp[2 * h + j] = d_g * (1.0 - gg * gg);
      dp[3 * h + j] = d_o * og * (1.0 - og);
      const double h_prev = first ? 0.0 : trace.hidden.at(t_prev, j);
      hp[j] = rm ? h_prev * rm[j] : h_prev;
    }

    dh_rec.noalias() = wh.transpose() * detail::ConstVectorMap(dp, static_cast<Eigen::Index>(4 * h));
    for (std::size_t j = 0; j < h; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      dh_next[jj] = rm ? dh_rec[jj] * rm[j] : dh_rec[jj];
    }
  }

  const auto dpre = as_matrix(d_pre);
  as_matrix(params.wx.grad).noalias() += dpre.transpose() * as_matrix(trace.x_masked);
  as_matrix(params.wh.grad).noalias() += dpre.transpose() * as_matrix(h_prev_masked);
  detail::as_vector(params.bias.grad) += dpre.colwise().sum().transpose();

  Tensor dx(steps, d);
  as_matrix(dx).noalias() = dpre * as_matrix(params.wx.value);
  if (const double* m = masks.input_at(0)) {
    for (std::size_t t = 0; t < steps; ++t) {
      auto row = dx.row(t);
      for (std::size_t k = 0; k < d; ++k) row[k] *= m[k];
    }
  }
  return dx;
}

void BiLstmStack::collect(std::vector<Parameter*>& out) {
  for (auto& layer : layers) {
    layer.forward.collect(out);
    layer.backward.collect(out);
  }
}

BiLstmStack make_bilstm_stack(const std::string& name, std::size_t input_dim,
                              const std::vector<std::size_t>& units, DropoutMode dropout,
                              double rate, Rng& rng) {
  if (units.empty()) throw InvalidInput("BiLSTM stack needs at least one layer");
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("dropout rate must lie in [0, 1)");
  BiLstmStack stack;
  stack.dropout = dropout;
  stack.dropout_rate = rate;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < units.size(); ++l) {
    const std::string prefix = name + ".l" + std::to_string(l);
    BiLstmLayer layer;
    layer.forward = make_lstm_params(prefix + ".fw", in, units[l], rng);
    layer.backward = make_lstm_params(prefix + ".bw", in, units[l], rng);
    stack.layers.push_back(std::move(layer));
    in = 2 * units[l];
  }
  return stack;
}

Tensor bilstm_forward(const BiLstmStack& stack, const Tensor& inputs, bool train_mode, Rng& rng,
                      BiLstmTrace* trace) {
  const std::size_t steps = inputs.rows();
  if (steps == 0) throw InvalidInput("BiLSTM over an empty sequence");
  if (trace) {
    trace->forward.assign(stack.layers.size(), {});
    trace->backward.assign(stack.layers.size(), {});
  }

  const Tensor* current = &inputs;
  Tensor layer_out;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const auto& layer = stack.layers[l];
    const std::size_t in = layer.forward.input_dim;
    const std::size_t h = layer.forward.units;
    const DropoutMode mode = train_mode ? stack.dropout : DropoutMode::none;
    const auto fw_masks = dropout_masks(mode, stack.dropout_rate, steps, in, h, rng);
    const auto bw_masks = dropout_masks(mode, stack.dropout_rate, steps, in, h, rng);

    const Tensor fw = lstm_forward(layer.forward, *current, false, fw_masks,
                                   trace ? &trace->forward[l] : nullptr);
    const Tensor bw = lstm_forward(layer.backward, *current, true, bw_masks,
                                   trace ? &trace->backward[l] : nullptr);
    Tensor joined(steps, 2 * h);
    for (std::size_t t = 0; t < steps; ++t) {
      auto dst = joined.row(t);
      const auto a = fw.row(t);
      const auto b = bw.row(t);
      std::copy(a.begin(), a.end(), dst.begin());
      std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(h));
    }
    layer_out = std::move(joined);
    current = &layer_out;
  }
  return layer_out;
}

Tensor bilstm_backward(BiLstmStack& stack, const BiLstmTrace& trace, const Tensor& d_output) {
  Tensor grad = d_output;
  for (std::size_t l = stack.layers.size(); l-- > 0;) {
    auto& layer = stack.layers[l];
    const std::size_t h = layer.forward.units;
    const std::size_t steps = grad.rows();
    Tensor d_fw(steps, h);
    Tensor d_bw(steps, h);
    for (std::size_t t = 0; t < steps; ++t) {
      const auto src = grad.row(t);
      std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(h), d_fw.row(t).begin());
      std::copy(src.begin() + static_cast<std::ptrdiff_t>(h), src.end(), d_bw.row(t).begin());
    }
    Tensor dx = lstm_backward(layer.forward, trace.forward[l], d_fw);
    const Tensor dx_bw = lstm_backward(layer.backward, trace.backward[l], d_bw);
    detail::as_vector(dx) += detail::as_vector(dx_bw);
    grad = std::move(dx);
  }
  return grad;
}

}  // namespace seedlab::nn
