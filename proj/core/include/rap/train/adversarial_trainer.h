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

#ifndef RAP_TRAIN_ADVERSARIAL_TRAINER_H_
#define RAP_TRAIN_ADVERSARIAL_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rap/data/movielens.h"
#include "rap/model/attacker.h"
#include "rap/model/recommender.h"
#include "rap/nn/adam.h"

namespace rap::train {

using data::Attribute;
using data::ItemId;
using data::UserId;

struct TrainConfig {
  double alpha = 1.0;
  double lambda = 0.01;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  int epochs = 20;
  std::size_t train_k = 35;
  std::uint64_t seed = 1;
  std::vector<Attribute> attributes = {data::kAllAttributes.begin(), data::kAllAttributes.end()};
  std::size_t negatives_per_positive = 1;
  std::size_t embed_dim = 70;
  std::size_t rec_hidden = 20;
  std::size_t att_hidden = 100;
  std::size_t max_sequence = 200;
  model::AttackerInit attacker_init = model::AttackerInit::kFanInScaled;

  void Validate() const;
};

struct EpochLog {
  int epoch = 0;
  double rec_loss = 0.0;  // mean L_DR over batches
  double att_loss = 0.0;  // mean L_DP over attacker steps; 0 when none ran
  double seconds = 0.0;
};

struct TrainState {
  TrainState(const TrainConfig& cfg, std::size_t num_users, std::size_t num_items);

  model::Recommender rec;
  model::Attacker att;
  nn::Adam rec_opt;
  nn::Adam att_opt;
  int epoch = 0;
  std::vector<EpochLog> history;
};

struct StepResult {
  double rec_loss = 0.0;  // L_DR including the L2 term
  double att_loss = 0.0;  // L_DP of the batch (0 when not computed)
};

// S_h for each user: training-rated items followed by the current top-K
// (capped at the number of unrated items).
std::vector<model::ItemListSequence> BuildItemLists(const model::Recommender& rec,
                                                    const data::RatingDataset& train,
                                                    std::span<const UserId> users,
                                                    std::size_t k);

// The attacker's view of a batch: labeled users and truncated sequences.
model::AttackerBatch MakeAttackerBatch(std::span<const model::ItemListSequence> lists,
                                       std::size_t max_sequence);

// One Adam step on theta_R for L_DR - alpha * L_DP. The L_DP term uses the
// supplied sequences (selection indices fixed) and is skipped when alpha is 0
// or the batch has no users.
StepResult RecommenderUpdate(TrainState& state, const TrainConfig& cfg,
                             std::span<const model::Triplet> triplets, std::size_t batch_users,
                             const model::AttackerBatch& att_batch,
                             const data::AttributeTable& labels);

// One Adam step on the enabled attacker heads; the recommender is a constant.
double AttackerUpdate(TrainState& state, const TrainConfig& cfg,
                      const model::AttackerBatch& att_batch, const data::AttributeTable& labels);

struct JointTerms {
  nn::Var objective;  // rec - alpha * att
  nn::Var rec;        // L_DR
  nn::Var att;        // L_DP; invalid when the attacker term is off
};

// The joint objective L_DR - alpha * L_DP on a tape. Recommender parameters
// are trainable, attacker parameters constant.
JointTerms JointObjective(TrainState& state, nn::Tape& tape, const TrainConfig& cfg,
                       std::span<const model::Triplet> triplets, std::size_t batch_users,
                       const model::AttackerBatch& att_batch,
                       const data::AttributeTable& labels);

using EpochCallback = std::function<void(const TrainState&)>;

// Algorithm-level loop: per mini-batch, recommender step, item-list rebuild,
// attacker step. Users whose labels are hidden in `labels` take part in the
// recommender objective only.
TrainState Fit(const TrainConfig& cfg, const data::RatingDataset& train,
               const data::AttributeTable& labels, const EpochCallback& on_epoch = {});

// Same batches and triplets with the attacker removed (alpha = 0, no
// attacker steps).
TrainState FitRecommenderOnly(const TrainConfig& cfg, const data::RatingDataset& train,
                              const EpochCallback& on_epoch = {});

std::string TrainingLogJson(const TrainConfig& cfg, const TrainState& state);
std::string ConfigJson(const TrainConfig& cfg);

// rec.* and att.* in one ParameterSet file.
void SaveCheckpoint(const TrainState& state, const std::filesystem::path& path);
model::Recommender LoadRecommender(const std::filesystem::path& path);

}  // namespace rap::train

#endif  // RAP_TRAIN_ADVERSARIAL_TRAINER_H_
