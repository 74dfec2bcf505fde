#pragma once

#include <Eigen/Core>

#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

inline MatrixMap as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
  return {t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
inline ConstMatrixMap as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return {t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
inline MatrixMap as_matrix(Tensor& t) { return as_matrix(t, t.rows(), t.cols()); }
inline ConstMatrixMap as_matrix(const Tensor& t) { return as_matrix(t, t.rows(), t.cols()); }
inline VectorMap as_vector(Tensor& t) { return {t.data(), static_cast<Eigen::Index>(t.size())}; }
inline ConstVectorMap as_vector(const Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.size())};
}

}  // namespace seedlab::nn::detail
