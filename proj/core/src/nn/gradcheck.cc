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

#include "rap/nn/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rap/rng.h"

namespace rap::nn {

GradCheckResult CheckGradients(ParameterSet& params, const std::function<double()>& loss,
                               const GradCheckOptions& options) {
  GradCheckResult result;
  Rng rng(options.seed);
  for (auto& [name, p] : params) {
    if (!p.has_grad()) continue;
    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.coords_per_tensor && coords.size() > options.coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_tensor);
    }
    for (std::size_t i : coords) {
      const double saved = p[i];
      p[i] = saved + options.step;
      const double up = loss();
      p[i] = saved - options.step;
      const double down = loss();
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double analytic = p.grad()[i];
      const double denom =
          std::max({std::abs(numeric), std::abs(analytic), options.abs_floor});
      const double err = std::abs(numeric - analytic) / denom;
      ++result.coords_checked;
      if (err > result.max_relative_error || std::isnan(err)) {
        result.max_relative_error = std::isnan(err) ? INFINITY : err;
        result.worst_coordinate = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace rap::nn
