// Copyright 2026 The RAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RAP_NN_EIGEN_MAP_H_
#define RAP_NN_EIGEN_MAP_H_

#include <Eigen/Core>

#include "rap/nn/tensor.h"

namespace rap::nn::internal {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

inline ConstMatrixMap AsMatrix(const Tensor& t) {
  return ConstMatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                        static_cast<Eigen::Index>(t.cols()));
}
inline MatrixMap AsMatrix(Tensor& t) {
  return MatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                   static_cast<Eigen::Index>(t.cols()));
}
inline MatrixMap AsMatrix(std::span<double> s, std::size_t rows, std::size_t cols) {
  return MatrixMap(s.data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}
inline ConstVectorMap AsVector(const Tensor& t) {
  return ConstVectorMap(t.data(), static_cast<Eigen::Index>(t.size()));
}
inline VectorMap AsVector(std::span<double> s) {
  return VectorMap(s.data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace rap::nn::internal

#endif  // RAP_NN_EIGEN_MAP_H_
