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

#ifndef RAP_NN_GRADCHECK_H_
#define RAP_NN_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "rap/nn/parameter_set.h"

namespace rap::nn {

struct GradCheckOptions {
  double step = 1e-5;
  // Coordinates sampled per tensor; 0 checks every coordinate.
  std::size_t coords_per_tensor = 0;
  // Denominator floor so near-zero gradients are compared absolutely.
  double abs_floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0;
  std::string worst_coordinate;
  std::size_t coords_checked = 0;
};

// Compares the gradients currently stored in `params` against central
// differences of `loss`, which must recompute the loss from the current
// parameter values. Parameters without a gradient are skipped. Values are
// restored afterwards.
GradCheckResult CheckGradients(ParameterSet& params, const std::function<double()>& loss,
                               const GradCheckOptions& options = {});

}  // namespace rap::nn

#endif  // RAP_NN_GRADCHECK_H_
