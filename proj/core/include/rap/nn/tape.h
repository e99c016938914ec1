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

#ifndef RAP_NN_TAPE_H_
#define RAP_NN_TAPE_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <span>

#include "rap/nn/tensor.h"

namespace rap::nn {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  // d(loss)/d(this) after Tape::Backward; empty if never reached.
  std::span<const double> grad() const;
  bool requires_grad() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode autodiff tape. Operations append nodes in evaluation order;
// Backward walks them in reverse. A tape is single-threaded; independent tapes
// may run concurrently.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape& tape, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf without gradient.
  Var Constant(Tensor value);
  // Leaf referring to an external tensor without copying; no gradient.
  Var ConstantRef(const Tensor& value);
  // Tape-owned leaf that receives a gradient.
  Var Variable(Tensor value);
  // Leaf bound to an external parameter. Backward adds d(loss)/d(param) into
  // param.grad(), allocating it if needed. The parameter must outlive the
  // tape and must not be modified while the tape is in use.
  Var Parameter(Tensor& param);

  // Populates gradients. The loss must be a single-element value that depends
  // on at least one Variable or Parameter. Calling Backward twice accumulates
  // into the bound parameters twice.
  void Backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // --- Op-author interface -------------------------------------------------
  // Records a derived node. `backward` is dropped when no input needs a
  // gradient.
  Var Record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  const Tensor& ValueOf(std::size_t id) const;
  bool RequiresGrad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Gradient buffer of a node, zero-allocated on first use.
  std::span<double> GradOf(std::size_t id);
  std::span<const double> GradIfAny(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor value;
    const Tensor* ref = nullptr;
    Tensor* param = nullptr;
    bool requires_grad = false;
    std::vector<double> grad;
    BackwardFn backward;
  };

  Var Push(Node node);
  void Check(Var v) const;

  std::deque<Node> nodes_;
};

}  // namespace rap::nn

#endif  // RAP_NN_TAPE_H_
