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

#ifndef RAP_EXPERIMENT_EXPERIMENT_H_
#define RAP_EXPERIMENT_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rap/data/movielens.h"
#include "rap/data/splits.h"
#include "rap/eval/adversary.h"
#include "rap/experiment/config.h"
#include "rap/experiment/report.h"
#include "rap/model/recommender.h"
#include "rap/train/adversarial_trainer.h"

namespace rap::experiment {

using data::Attribute;
using data::UserId;

struct Corpus {
  data::RatingDataset ratings;
  data::AttributeTable attributes;
};

Corpus LoadCorpus(const ExperimentConfig& cfg);

// A trained defense: the training state and the rating data it saw.
struct Defense {
  train::TrainState state;
  data::RatingDataset data;
  train::TrainConfig config;

  const model::Recommender& model() const { return state.rec; }
};

struct BaselineInputs {
  const data::RatingDataset* train = nullptr;
  // Labels visible to training code (hidden users raise on access).
  const data::AttributeTable* visible_labels = nullptr;
  // Every user's own labels, used only by BlurMe on the user's side.
  const data::AttributeTable* own_labels = nullptr;
  // Users whose profiles the perturbation defenses rewrite.
  std::span<const UserId> protected_users;
  Attribute blurme_attribute = Attribute::kGender;
};

// method: original (alpha = 0), rap, blurme or ldp. The perturbation
// defenses rewrite the protected users' data and then train the alpha = 0
// recommender on it.
Defense RunBaseline(const std::string& method, const ExperimentConfig& cfg,
                    const train::TrainConfig& train_cfg, const BaselineInputs& inputs);

// Top-k unrated items (capped at the number of unrated items).
std::vector<data::ItemId> Recommend(const model::Recommender::Ranker& ranker,
                                    const data::RatingDataset& known, UserId user,
                                    std::size_t k);

struct CellSpec {
  std::string method;  // original | rap | blurme | ldp
  std::string label;   // report row name
  int l = 35;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  std::vector<Attribute> attributes = {data::kAllAttributes.begin(),
                                       data::kAllAttributes.end()};
  bool utility = true;
  bool privacy = true;
};

using ProgressFn = std::function<void(const std::string&)>;

class ExperimentRunner {
 public:
  ExperimentRunner(ExperimentConfig cfg, Corpus corpus);

  const ExperimentConfig& config() const { return cfg_; }
  const Corpus& corpus() const { return corpus_; }
  void set_progress(ProgressFn fn) { progress_ = std::move(fn); }

  CellResult RunCell(const CellSpec& cell);

  // Methods x l x seeds.
  ExperimentReport RunTable1();
  // alpha = 0 (the Original row) and each configured alpha at the first l.
  ExperimentReport RunAlphaSweep();
  // RAP and the three single-attribute variants at the first l.
  ExperimentReport RunVariants();

  // Averaged P@K (all users and evaluable users) for a model under a split.
  struct Utility {
    double precision = 0.0, recall = 0.0, precision_eval = 0.0, recall_eval = 0.0;
    std::size_t evaluable = 0;
  };
  static Utility EvaluateUtility(const model::Recommender& rec, const data::RatingDataset& known,
                                 const data::RecSplit& split, std::size_t k);

 private:
  train::TrainConfig TrainConfigFor(const CellSpec& cell) const;
  void RunUtility(const CellSpec& cell, CellResult& out);
  void RunPrivacy(const CellSpec& cell, CellResult& out);
  const eval::MlpAdversary& Adversary(const data::AttackSplit& split, Attribute attribute);
  std::string CacheKey(const CellSpec& cell, const char* half) const;
  bool LoadCached(const std::string& key, CellResult& out) const;
  void StoreCached(const std::string& key, const CellResult& cell) const;
  void Note(const std::string& msg) const;

  ExperimentConfig cfg_;
  Corpus corpus_;
  ProgressFn progress_;
  std::map<std::tuple<std::uint64_t, int, int>, std::unique_ptr<eval::MlpAdversary>> adversaries_;
};

// Row label for a method name: Original, RAP, BlurMe, LDP.
std::string MethodLabel(const std::string& method);

}  // namespace rap::experiment

#endif  // RAP_EXPERIMENT_EXPERIMENT_H_
