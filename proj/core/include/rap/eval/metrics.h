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

#ifndef RAP_EVAL_METRICS_H_
#define RAP_EVAL_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rap/data/movielens.h"

namespace rap::eval {

using data::ItemId;

// |heldout ∩ top-K| / K. Requires K > 0 and |recommended| >= K.
double PrecisionAtK(std::span<const ItemId> heldout, std::span<const ItemId> recommended,
                    std::size_t k);
// |heldout ∩ top-K| / |heldout|. Requires a nonempty heldout set.
double RecallAtK(std::span<const ItemId> heldout, std::span<const ItemId> recommended,
                 std::size_t k);

// Rank-sum AUC with midranks for ties. Throws if either class is empty.
double BinaryAuc(std::span<const double> scores, std::span<const std::uint8_t> positive);

// Micro-averaged one-vs-rest AUC: every (sample, class) pair becomes one
// binary example with score probs[i][c] and target [label_i == c], and the
// pooled set is scored with BinaryAuc. Throws if fewer than two classes occur
// among the labels.
double MicroAuc(const std::vector<std::vector<double>>& probs, std::span<const int> labels);

}  // namespace rap::eval

#endif  // RAP_EVAL_METRICS_H_
