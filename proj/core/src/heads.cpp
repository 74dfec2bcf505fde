#include "seedlab/nn/heads.hpp"

#include <cmath>

#include "eigen_maps.hpp"
#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::nn {

using detail::as_matrix;
using detail::as_vector;

LinearParams make_linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
  LinearParams p;
  p.weight = Parameter(name + ".weight", glorot_init({out, in}, rng));
  p.bias = Parameter(name + ".bias", Tensor({out}));
  return p;
}

Tensor linear_forward(const LinearParams& params, const Tensor& x) {
  const std::size_t out_dim = params.weight.value.rows();
  const std::size_t in_dim = params.weight.value.cols();
  if (x.cols() != in_dim) throw InvalidInput("linear layer input width mismatch");
  Tensor y(x.rows(), out_dim);
  auto ym = as_matrix(y);
  ym.noalias() = as_matrix(x) * as_matrix(params.weight.value).transpose();
  ym.rowwise() += as_vector(params.bias.value).transpose();
  return y;
}

Tensor linear_backward(LinearParams& params, const Tensor& x, const Tensor& d_output) {
  const auto dy = as_matrix(d_output);
  as_matrix(params.weight.grad).noalias() += dy.transpose() * as_matrix(x);
  as_vector(params.bias.grad) += dy.colwise().sum().transpose();
  Tensor dx(x.rows(), x.cols());
  as_matrix(dx).noalias() = dy * as_matrix(params.weight.value);
  return dx;
}

LossAndGrad softmax_nll(const Tensor& logits, std::span<const int> gold) {
  const std::size_t steps = logits.rows();
  const std::size_t labels = logits.cols();
  if (gold.size() != steps) throw InvalidInput("softmax_nll: gold length mismatch");
  if (steps == 0) throw InvalidInput("softmax_nll of an empty sequence");
  LossAndGrad out{0.0, Tensor(steps, labels)};
  const double scale = 1.0 / static_cast<double>(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    if (gold[t] < 0 || static_cast<std::size_t>(gold[t]) >= labels)
      throw InvalidInput("softmax_nll: label id out of range");
    const auto row = logits.row(t);
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    const double log_z = mx + std::log(z);
    out.loss += log_z - row[static_cast<std::size_t>(gold[t])];
    auto g = out.grad.row(t);
    for (std::size_t j = 0; j < labels; ++j) g[j] = std::exp(row[j] - log_z) * scale;
    g[static_cast<std::size_t>(gold[t])] -= scale;
  }
  out.loss *= scale;
  return out;
}

std::vector<int> argmax_rows(const Tensor& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t t = 0; t < scores.rows(); ++t) {
    const auto row = scores.row(t);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j)
      if (row[j] > row[best]) best = j;
    out[t] = static_cast<int>(best);
  }
  return out;
}

}  // namespace seedlab::nn
