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

#ifndef RAP_MODEL_ATTACKER_H_
#define RAP_MODEL_ATTACKER_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rap/data/movielens.h"
#include "rap/model/recommender.h"
#include "rap/nn/parameter_set.h"
#include "rap/nn/tape.h"
#include "rap/rng.h"

namespace rap::model {

using data::Attribute;

// S_h: rated items by ascending timestamp (ties by item index), then
// recommendations in rank order. An item appears once, in the first segment
// that contains it.
struct ItemListSequence {
  UserId user = 0;
  std::vector<ItemId> items;
  std::vector<bool> recommended;  // provenance, parallel to items

  std::size_t size() const { return items.size(); }
  // The last `max_length` items (all of them when max_length is 0).
  std::vector<ItemId> Tail(std::size_t max_length) const;
};

ItemListSequence OrderItems(UserId user, std::span<const data::Rating> rated,
                            std::span<const ItemId> recommendations);

enum class AttackerInit {
  // Uniform[-1/sqrt(fan_in), 1/sqrt(fan_in)].
  kFanInScaled,
  // Uniform[0, 1] for every weight.
  kUnitUniform,
};

struct AttackerShape {
  std::size_t embed_dim = 70;
  std::size_t hidden_dim = 100;
  AttackerInit init = AttackerInit::kFanInScaled;
};

// Private-attribute inference component. One independent Elman RNN and
// softmax head per attribute:
//
//   z = RNN(p_{s_1}, ..., p_{s_n}),   p_hat_t = softmax(w_t [z; q_h] + b_t)
//
// where p are item embeddings and q_h the user embedding, both read from the
// recommender. Parameters live under "att.<attribute>.".
class Attacker {
 public:
  Attacker(const AttackerShape& shape, Rng& rng);
  explicit Attacker(const AttackerShape& shape);  // all-zero weights
  explicit Attacker(nn::ParameterSet params);

  const AttackerShape& shape() const { return shape_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  static std::string Prefix(Attribute attribute);

  struct HeadVars {
    nn::Var w_in, w_hh, b_h, head_w, head_b;
  };
  HeadVars Bind(nn::Tape& tape, Attribute attribute, bool trainable);

  // Class probabilities [batch x C] for the given users and sequences.
  nn::Var Probabilities(const HeadVars& head, nn::Var user_embed, nn::Var item_embed,
                        std::span<const UserId> users,
                        const std::vector<std::vector<ItemId>>& sequences) const;

  // p_hat_{h,t} for one user.
  std::vector<double> PredictAttribute(const Recommender& rec, const ItemListSequence& seq,
                                       Attribute attribute, std::size_t max_length = 0);

 private:
  AttackerShape shape_;
  nn::ParameterSet params_;
};

// Labeled batch for the attacker. Labels are read through the table, so a
// hidden (test) user in the batch raises LeakageError.
struct AttackerBatch {
  std::vector<UserId> users;
  std::vector<std::vector<ItemId>> sequences;  // already truncated
};

// mean over users of mean over `attributes` of cross-entropy.
nn::Var AttackerLoss(Attacker& attacker, nn::Tape& tape, bool train_attacker,
                     const Recommender::Vars& rec, const AttackerBatch& batch,
                     const data::AttributeTable& labels,
                     std::span<const Attribute> attributes);

// Per-user sum over the batch of mean_t cross-entropy, i.e. AttackerLoss
// times the batch size; building block of the joint objective.
nn::Var AttackerLossSum(Attacker& attacker, nn::Tape& tape, bool train_attacker,
                        const Recommender::Vars& rec, const AttackerBatch& batch,
                        const data::AttributeTable& labels,
                        std::span<const Attribute> attributes);

// Sum of squared attacker weights for the given attributes, on the tape.
nn::Var AttackerL2(Attacker& attacker, nn::Tape& tape, std::span<const Attribute> attributes);

}  // namespace rap::model

#endif  // RAP_MODEL_ATTACKER_H_
