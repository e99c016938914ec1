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

#include "rap/nn/tensor.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include "rap/errors.h"

namespace rap::nn {

std::string ShapeString(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(NumElements(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != NumElements(shape_)) {
    throw ShapeError("tensor of shape " + ShapeString(shape_) + " given " +
                     std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::Vector(std::initializer_list<double> values) {
  return Tensor(Shape{values.size()}, std::vector<double>(values));
}

Tensor Tensor::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor(Shape{r, c}, std::move(values));
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw ShapeError("item() on tensor of shape " + ShapeString(shape_));
  }
  return values_[0];
}

std::span<double> Tensor::EnsureGrad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  return grad_;
}

void Tensor::ZeroGrad() {
  std::fill(grad_.begin(), grad_.end(), 0.0);
}

void Tensor::Reshape(Shape shape) {
  if (NumElements(shape) != values_.size()) {
    throw ShapeError("cannot reshape " + ShapeString(shape_) + " to " +
                     ShapeString(shape));
  }
  shape_ = std::move(shape);
}

}  // namespace rap::nn
