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

#ifndef RAP_MODEL_RECOMMENDER_H_
#define RAP_MODEL_RECOMMENDER_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rap/data/movielens.h"
#include "rap/nn/parameter_set.h"
#include "rap/nn/tape.h"
#include "rap/rng.h"

namespace rap::model {

using data::ItemId;
using data::UserId;

struct RecommenderShape {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t embed_dim = 70;
  std::size_t hidden_dim = 20;
};

// Training instance: the user prefers `first` over `second` when label is +1.
struct Triplet {
  UserId user = 0;
  ItemId first = 0;
  ItemId second = 0;
  int label = 1;
};

// Pairwise-ranking recommender. Users and items are embedded, passed through
// one shared ReLU layer, and the concatenated [user; item] hidden vectors go
// through a shared ReLU output unit:
//
//   H_x = ReLU(W e_x + b_H),   y(h, j) = ReLU(w_o [H_h; H_j] + b_o)
//
// Parameters live in a ParameterSet under the "rec." prefix.
class Recommender {
 public:
  static constexpr const char* kUserEmbed = "rec.user_embed";
  static constexpr const char* kItemEmbed = "rec.item_embed";
  static constexpr const char* kHiddenW = "rec.hidden.w";
  static constexpr const char* kHiddenB = "rec.hidden.b";
  static constexpr const char* kOutW = "rec.out.w";
  static constexpr const char* kOutB = "rec.out.b";
  static constexpr const char* kPrefix = "rec.";

  // Every weight drawn from Uniform[0, 1].
  Recommender(const RecommenderShape& shape, Rng& rng);
  // All-zero parameters.
  explicit Recommender(const RecommenderShape& shape);
  // Adopts parameters from a checkpoint; shapes are inferred.
  explicit Recommender(nn::ParameterSet params);

  const RecommenderShape& shape() const { return shape_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  // Parameter handles on a tape: trainable binds gradients to the parameters,
  // otherwise they enter as constants.
  struct Vars {
    nn::Var user_embed, item_embed, hidden_w, hidden_b, out_w, out_b;
  };
  Vars Bind(nn::Tape& tape, bool trainable);

  // (y(h, j), y(h, k)) from the two towers.
  std::pair<double, double> ScorePair(UserId h, ItemId j, ItemId k) const;
  // 0.5 * (y + y') on the tuple (h, j, j).
  double ScoreItem(UserId h, ItemId j) const;

  // Precomputed item-side hidden layer for ranking many users. Scores match
  // ScoreItem bit for bit. Invalidated by any parameter change.
  class Ranker {
   public:
    explicit Ranker(const Recommender& model);
    std::vector<double> ScoreAll(UserId h) const;
    // Top-K unrated items, scores non-increasing, ties by ascending index.
    // `rated` must be sorted ascending.
    std::vector<ItemId> TopK(UserId h, std::span<const ItemId> rated, std::size_t k) const;

   private:
    const Recommender& model_;
    std::vector<double> item_hidden_;  // num_items x hidden_dim
  };

  std::vector<ItemId> TopK(UserId h, std::span<const ItemId> rated, std::size_t k) const {
    return Ranker(*this).TopK(h, rated, k);
  }

 private:
  friend class Ranker;
  void CheckUser(UserId h) const;
  void CheckItem(ItemId j) const;
  // ReLU(W e + b) for an embedding row.
  void Hidden(const double* embed, double* out) const;
  double Output(const double* user_hidden, const double* item_hidden) const;

  RecommenderShape shape_;
  nn::ParameterSet params_;
};

// (1/num_users) * sum_triplets -ln sigmoid((y_first - y_second) * label)
// + lambda * ||theta_R||^2. Throws on an empty batch.
nn::Var BprLoss(const Recommender::Vars& vars, std::span<const Triplet> triplets,
                std::size_t num_users, double lambda);

// Sum over all rec.* parameters of their squared values, on the tape.
nn::Var RecommenderL2(const Recommender::Vars& vars);

// One positive per rated item and `negatives_per_positive` negatives drawn
// uniformly from the user's unrated items; each instance is emitted as
// (h, j, k, +1) or, with probability 1/2, as (h, k, j, -1). Users that rated
// every item are skipped and reported in `skipped`.
std::vector<Triplet> SampleTriplets(const data::RatingDataset& train,
                                    std::span<const UserId> users,
                                    std::size_t negatives_per_positive, Rng& rng,
                                    std::vector<UserId>* skipped = nullptr);

}  // namespace rap::model

#endif  // RAP_MODEL_RECOMMENDER_H_
