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

#ifndef RAP_NN_ADAM_H_
#define RAP_NN_ADAM_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rap/nn/parameter_set.h"

namespace rap::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments are created lazily per parameter name.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // Updates every parameter whose name starts with `prefix`. Each must carry
  // a gradient. Gradients are left untouched.
  void Step(ParameterSet& params, std::string_view prefix = {});
  // One step (one increment of t) over the union of several prefixes.
  void Step(ParameterSet& params, const std::vector<std::string>& prefixes);

  std::int64_t step_count() const { return t_; }
  const AdamOptions& options() const { return options_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };

  AdamOptions options_;
  std::int64_t t_ = 0;
  std::map<std::string, Moments, std::less<>> moments_;
};

}  // namespace rap::nn

#endif  // RAP_NN_ADAM_H_
