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

#ifndef RAP_NN_TENSOR_H_
#define RAP_NN_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rap::nn {

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape& shape);
std::size_t NumElements(const Shape& shape);

// Dense row-major array of doubles with an optional gradient buffer.
// Rank 0 is a scalar, rank 1 a vector, rank 2 a (rows x cols) matrix; batched
// operations treat a rank-1 tensor as a single row.
class Tensor {
 public:
  Tensor() : Tensor(Shape{}) {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double v) { return Tensor(Shape{}, {v}); }
  static Tensor Vector(std::initializer_list<double> values);
  static Tensor Matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t rows() const { return rank() == 2 ? shape_[0] : 1; }
  std::size_t cols() const {
    return rank() == 2 ? shape_[1] : (rank() == 1 ? shape_[0] : 1);
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double item() const;  // scalar value; throws unless size() == 1

  bool has_grad() const { return !grad_.empty(); }
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }
  // Allocates a zeroed gradient if absent.
  std::span<double> EnsureGrad();
  void ZeroGrad();
  void DropGrad() { grad_.clear(); }

  void Reshape(Shape shape);

 private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

}  // namespace rap::nn

#endif  // RAP_NN_TENSOR_H_
