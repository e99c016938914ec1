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

#ifndef RAP_NN_OPS_H_
#define RAP_NN_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rap/nn/tape.h"

namespace rap::nn {

inline constexpr double kProbabilityFloor = 1e-12;

// 1 / (1 + e^-x) without overflow for large |x|.
double StableSigmoid(double x);
// log(sigmoid(x)) without underflow.
double StableLogSigmoid(double x);

// x W^T + b. x is [in] or [batch x in], W is [out x in], b is [out].
Var Affine(Var x, Var w, Var b);
// [m x k] * [k x n].
Var MatMul(Var a, Var b);

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);  // elementwise
Var Scale(Var x, double factor);

// Elementwise; the ReLU subgradient at 0 is 0.
Var Relu(Var x);
Var Tanh(Var x);
Var Sigmoid(Var x);
Var LogSigmoid(Var x);

// Row-wise softmax with max subtraction. Throws on empty input.
Var Softmax(Var x);

// -log(max(p[label], kProbabilityFloor)) per row. probs is [C] (one label,
// scalar result) or [batch x C] (one label per row, result [batch]).
Var CrossEntropy(Var probs, std::span<const int> labels);

// Concatenation along the last axis; row counts must agree.
Var Concat(Var a, Var b);

// Rows of `table` [R x C] selected by index -> [n x C]. Backward scatter-adds
// into the table gradient.
Var GatherRows(Var table, std::span<const std::int32_t> rows);

Var Sum(Var x);
Var Mean(Var x);
Var SquaredNorm(Var x);

// Elman step: tanh(x W_in^T + h W_hh^T + b). x is [d] or [batch x d], h is
// [H] or [batch x H], W_in [H x d], W_hh [H x H], b [H].
Var RnnStep(Var x, Var h, Var w_in, Var w_hh, Var b);

// Runs an Elman RNN over each sequence of item indices, reading inputs from
// rows of `table`, starting from the zero state. Returns the final states
// [num_sequences x H]; an empty sequence yields the zero vector. Equivalent to
// chaining RnnStep over GatherRows, fused for speed.
Var RnnFinalStates(Var table, const std::vector<std::vector<std::int32_t>>& sequences,
                   Var w_in, Var w_hh, Var b);

}  // namespace rap::nn

#endif  // RAP_NN_OPS_H_
