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

#include "rap/nn/tape.h"

#include <algorithm>

#include "rap/errors.h"

namespace rap::nn {

const Tensor& Var::value() const {
  if (!tape_) throw UsageError("use of an empty Var");
  return tape_->ValueOf(id_);
}

std::span<const double> Var::grad() const {
  if (!tape_) throw UsageError("use of an empty Var");
  return tape_->GradIfAny(id_);
}

bool Var::requires_grad() const { return tape_ && tape_->RequiresGrad(id_); }

Var Tape::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::Check(Var v) const {
  if (v.tape_ != this) throw UsageError("Var belongs to a different tape");
}

Var Tape::Constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Tape::ConstantRef(const Tensor& value) {
  Node n;
  n.ref = &value;
  return Push(std::move(n));
}

Var Tape::Variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return Push(std::move(n));
}

Var Tape::Parameter(Tensor& param) {
  Node n;
  n.ref = &param;
  n.param = &param;
  n.requires_grad = true;
  return Push(std::move(n));
}

Var Tape::Record(Tensor value, std::initializer_list<Var> inputs,
                 BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (Var in : inputs) {
    Check(in);
    n.requires_grad = n.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return Push(std::move(n));
}

const Tensor& Tape::ValueOf(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.ref ? *n.ref : n.value;
}

std::span<double> Tape::GradOf(std::size_t id) {
  Node& n = nodes_[id];
  const std::size_t size = (n.ref ? *n.ref : n.value).size();
  if (n.grad.size() != size) n.grad.assign(size, 0.0);
  return n.grad;
}

void Tape::Backward(Var loss) {
  Check(loss);
  if (ValueOf(loss.id_).size() != 1) {
    throw UsageError("backward needs a single-element loss, got shape " +
                     ShapeString(ValueOf(loss.id_).shape()));
  }
  if (!nodes_[loss.id_].requires_grad) {
    throw UsageError("backward on a value detached from every parameter");
  }
  for (Node& n : nodes_) n.grad.clear();
  GradOf(loss.id_)[0] = 1.0;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
  for (Node& n : nodes_) {
    if (!n.param || n.grad.empty()) continue;
    auto dst = n.param->EnsureGrad();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
  }
}

}  // namespace rap::nn
