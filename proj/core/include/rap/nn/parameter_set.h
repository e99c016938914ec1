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

#ifndef RAP_NN_PARAMETER_SET_H_
#define RAP_NN_PARAMETER_SET_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "rap/nn/tensor.h"

namespace rap::nn {

// Named parameters iterated in lexicographic name order.
class ParameterSet {
 public:
  Tensor& Add(const std::string& name, Tensor value);
  Tensor& Get(std::string_view name);
  const Tensor& Get(std::string_view name) const;
  bool Contains(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t NumValues() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void ZeroGrad();
  // Sum of squared values; optional name-prefix filter.
  double SquaredNorm(std::string_view prefix = {}) const;
  bool AllFinite() const;
  // FNV-1a over the raw bytes of every value, for isolation checks.
  std::uint64_t Checksum(std::string_view prefix = {}) const;

  // Flat checkpoint: magic, count, then (name, shape) headers, then the
  // values as little-endian IEEE-754 doubles in iteration order.
  void Save(std::ostream& out) const;
  void Save(const std::filesystem::path& path) const;
  static ParameterSet Load(std::istream& in);
  static ParameterSet Load(const std::filesystem::path& path);

  // Copies values for every name present in both sets (shapes must match).
  void CopyValuesFrom(const ParameterSet& other, std::string_view prefix = {});

 private:
  std::map<std::string, Tensor, std::less<>> params_;
};

bool BitwiseEqual(const ParameterSet& a, const ParameterSet& b);

}  // namespace rap::nn

#endif  // RAP_NN_PARAMETER_SET_H_
