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

#ifndef RAP_EVAL_ADVERSARY_H_
#define RAP_EVAL_ADVERSARY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rap/data/movielens.h"
#include "rap/nn/parameter_set.h"

namespace rap::eval {

using data::Attribute;
using data::ItemId;
using data::UserId;

// x[i] = 1 iff item i is in the list.
std::vector<double> Featurize(std::span<const ItemId> items, std::size_t num_items);

struct AdversaryOptions {
  std::size_t hidden = 100;
  int epochs = 50;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

// One-hidden-layer ReLU classifier over multi-hot item lists, softmax output.
class MlpAdversary {
 public:
  MlpAdversary(std::size_t num_items, std::size_t hidden, int num_classes, std::uint64_t seed);

  std::size_t num_items() const { return num_items_; }
  int num_classes() const { return num_classes_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  std::vector<std::vector<double>> Predict(
      const std::vector<std::vector<ItemId>>& lists) const;

 private:
  std::size_t num_items_;
  int num_classes_;
  nn::ParameterSet params_;
};

// Trains on the listed users. Labels are read through the table, so any
// hidden user raises LeakageError.
MlpAdversary TrainAdversary(const std::vector<std::vector<ItemId>>& lists,
                            std::span<const UserId> users, const data::AttributeTable& labels,
                            Attribute attribute, std::size_t num_items,
                            const AdversaryOptions& options);

struct AttackResult {
  Attribute attribute = Attribute::kGender;
  double auc = 0.0;
  std::size_t num_test = 0;
  int num_classes = 0;
  std::uint64_t seed = 0;
};

// Micro-AUC of the adversary on test lists against their true labels.
AttackResult EvaluateAttack(const MlpAdversary& adversary,
                            const std::vector<std::vector<ItemId>>& test_lists,
                            std::span<const int> true_labels, Attribute attribute,
                            std::uint64_t seed);

std::string AttackResultsJson(std::span<const AttackResult> results);

}  // namespace rap::eval

#endif  // RAP_EVAL_ADVERSARY_H_
