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

#include "rap/nn/adam.h"

#include <cmath>

#include "rap/errors.h"

namespace rap::nn {

namespace {

bool Selected(std::string_view name, const std::vector<std::string>& prefixes) {
  for (const auto& prefix : prefixes) {
    if (name.substr(0, prefix.size()) == prefix) return true;
  }
  return false;
}

}  // namespace

void Adam::Step(ParameterSet& params, std::string_view prefix) {
  Step(params, std::vector<std::string>{std::string(prefix)});
}

void Adam::Step(ParameterSet& params, const std::vector<std::string>& prefixes) {
  for (auto& [name, p] : params) {
    if (!Selected(name, prefixes)) continue;
    if (!p.has_grad()) throw UsageError("adam: parameter '" + name + "' has no gradient");
  }
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = options_.learning_rate;
  const double eps = options_.epsilon;
  for (auto& [name, p] : params) {
    if (!Selected(name, prefixes)) continue;
    Moments& mo = moments_[name];
    if (mo.m.size() != p.size()) {
      mo.m.assign(p.size(), 0.0);
      mo.v.assign(p.size(), 0.0);
    }
    auto g = p.grad();
    auto w = p.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      mo.m[i] = b1 * mo.m[i] + (1.0 - b1) * g[i];
      mo.v[i] = b2 * mo.v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = mo.m[i] / c1;
      const double v_hat = mo.v[i] / c2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

}  // namespace rap::nn
