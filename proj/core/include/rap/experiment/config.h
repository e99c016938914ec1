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

#ifndef RAP_EXPERIMENT_CONFIG_H_
#define RAP_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rap/eval/adversary.h"
#include "rap/train/adversarial_trainer.h"

namespace rap::experiment {

using FlatConfig = std::map<std::string, std::string, std::less<>>;

// "key = value" lines; '#' starts a comment; blank lines are ignored.
FlatConfig ParseFlatConfig(std::string_view text);
FlatConfig LoadFlatConfig(const std::filesystem::path& path);
std::string FormatFlatConfig(const FlatConfig& config);

struct ExperimentConfig {
  std::filesystem::path ratings_path;
  std::filesystem::path users_path;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<int> l_values = {35, 40, 45};
  std::vector<std::string> methods = {"original", "ldp", "blurme", "rap"};
  std::vector<double> alpha_values = {0.25, 0.5, 0.75, 1.0};
  std::size_t top_k = 35;
  double train_fraction = 0.8;
  double blurme_fraction = 0.1;
  double ldp_epsilon = 1.0;
  train::TrainConfig train;
  eval::AdversaryOptions adversary;
  std::filesystem::path cache_dir;  // empty disables caching
  std::filesystem::path output_dir = "results";

  // Every key understood by Apply, for help text and validation.
  static const std::vector<std::string>& Keys();
  // Sets `key`; throws ValidationError on an unknown key or bad value.
  void Set(std::string_view key, std::string_view value);
  void Apply(const FlatConfig& config);
  FlatConfig ToFlat() const;
  void Validate() const;
};

// data_dir sets both paths to <dir>/u.data and <dir>/u.user.
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

std::vector<data::Attribute> ParseAttributeList(std::string_view text);
std::string FormatAttributeList(const std::vector<data::Attribute>& attributes);

}  // namespace rap::experiment

#endif  // RAP_EXPERIMENT_CONFIG_H_
