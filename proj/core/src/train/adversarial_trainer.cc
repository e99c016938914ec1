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

#include "rap/train/adversarial_trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rap/errors.h"
#include "rap/nn/ops.h"

namespace rap::train {

using model::AttackerBatch;
using model::ItemListSequence;
using model::Triplet;
using nlohmann::json;

void TrainConfig::Validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (attributes.empty()) throw ValidationError("at least one attribute must be enabled");
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    for (std::size_t j = i + 1; j < attributes.size(); ++j) {
      if (attributes[i] == attributes[j]) throw ValidationError("duplicate attribute in mask");
    }
  }
  if (embed_dim == 0 || rec_hidden == 0 || att_hidden == 0) {
    throw ValidationError("model dimensions must be positive");
  }
}

namespace {

model::Recommender InitRecommender(const TrainConfig& cfg, std::size_t n, std::size_t m) {
  Rng rng = MakeRng(cfg.seed, {kStreamRecInit});
  return model::Recommender({n, m, cfg.embed_dim, cfg.rec_hidden}, rng);
}

model::Attacker InitAttacker(const TrainConfig& cfg) {
  Rng rng = MakeRng(cfg.seed, {kStreamAttInit});
  return model::Attacker({cfg.embed_dim, cfg.att_hidden, cfg.attacker_init}, rng);
}

std::vector<std::string> AttackerPrefixes(const TrainConfig& cfg) {
  std::vector<std::string> out;
  for (Attribute a : cfg.attributes) out.push_back(model::Attacker::Prefix(a));
  return out;
}

void CheckFinite(double value, const char* what, const TrainState& state) {
  if (std::isfinite(value)) return;
  std::ostringstream msg;
  msg << "non-finite " << what << " (" << value << ") at epoch " << state.epoch + 1
      << ", rec step " << state.rec_opt.step_count() << ", attacker step "
      << state.att_opt.step_count() << "; |theta_R|^2=" << state.rec.params().SquaredNorm()
      << ", |theta_P|^2=" << state.att.params().SquaredNorm();
  throw NumericalError(msg.str());
}

std::vector<UserId> TrainableUsers(const data::RatingDataset& train) {
  std::vector<UserId> users;
  for (std::size_t u = 0; u < train.num_users(); ++u) {
    if (!train.RatedItems(static_cast<UserId>(u)).empty()) users.push_back(static_cast<UserId>(u));
  }
  return users;
}

TrainState RunLoop(const TrainConfig& cfg, const data::RatingDataset& train,
                   const data::AttributeTable* labels, const EpochCallback& on_epoch) {
  cfg.Validate();
  if (train.num_users() == 0 || train.num_ratings() == 0) {
    throw ValidationError("training set is empty");
  }
  if (labels && labels->num_users() != train.num_users()) {
    throw ValidationError("attribute table and training set disagree on the user count");
  }
  TrainState state(cfg, train.num_users(), train.num_items());
  std::vector<UserId> users = TrainableUsers(train);
  const AttackerBatch no_attack;
  const data::AttributeTable no_labels;
  const data::AttributeTable& table = labels ? *labels : no_labels;

  for (int e = 0; e < cfg.epochs; ++e) {
    const auto start = std::chrono::steady_clock::now();
    Rng order_rng = MakeRng(cfg.seed, {kStreamBatches, static_cast<std::uint64_t>(e)});
    std::shuffle(users.begin(), users.end(), order_rng);
    double rec_sum = 0.0, att_sum = 0.0;
    std::size_t rec_steps = 0, att_steps = 0;

    for (std::size_t lo = 0, b = 0; lo < users.size(); lo += cfg.batch_size, ++b) {
      const std::size_t hi = std::min(users.size(), lo + cfg.batch_size);
      std::span<const UserId> batch(users.data() + lo, hi - lo);
      Rng triplet_rng = MakeRng(cfg.seed, {kStreamTriplets, static_cast<std::uint64_t>(e), b});
      const std::vector<Triplet> triplets =
          model::SampleTriplets(train, batch, cfg.negatives_per_positive, triplet_rng);

      std::vector<UserId> labeled;
      if (labels) {
        for (UserId u : batch) {
          if (labels->HasLabels(u)) labeled.push_back(u);
        }
      }
      std::sort(labeled.begin(), labeled.end());

      if (!triplets.empty()) {
        AttackerBatch before;
        if (cfg.alpha > 0.0 && !labeled.empty()) {
          before = MakeAttackerBatch(BuildItemLists(state.rec, train, labeled, cfg.train_k),
                                     cfg.max_sequence);
        }
        StepResult r = RecommenderUpdate(state, cfg, triplets, batch.size(),
                                         before.users.empty() ? no_attack : before, table);
        rec_sum += r.rec_loss;
        ++rec_steps;
      }
      if (labels && !labeled.empty()) {
        AttackerBatch after = MakeAttackerBatch(
            BuildItemLists(state.rec, train, labeled, cfg.train_k), cfg.max_sequence);
        att_sum += AttackerUpdate(state, cfg, after, table);
        ++att_steps;
      }
    }

    EpochLog log;
    log.epoch = e + 1;
    log.rec_loss = rec_steps ? rec_sum / static_cast<double>(rec_steps) : 0.0;
    log.att_loss = att_steps ? att_sum / static_cast<double>(att_steps) : 0.0;
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!state.rec.params().AllFinite()) CheckFinite(NAN, "recommender parameter", state);
    if (!state.att.params().AllFinite()) CheckFinite(NAN, "attacker parameter", state);
    state.history.push_back(log);
    state.epoch = e + 1;
    if (on_epoch) on_epoch(state);
  }
  return state;
}

}  // namespace

TrainState::TrainState(const TrainConfig& cfg, std::size_t num_users, std::size_t num_items)
    : rec(InitRecommender(cfg, num_users, num_items)),
      att(InitAttacker(cfg)),
      rec_opt(nn::AdamOptions{cfg.learning_rate}),
      att_opt(nn::AdamOptions{cfg.learning_rate}) {}

std::vector<ItemListSequence> BuildItemLists(const model::Recommender& rec,
                                             const data::RatingDataset& train,
                                             std::span<const UserId> users, std::size_t k) {
  std::vector<ItemListSequence> out;
  out.reserve(users.size());
  const model::Recommender::Ranker ranker(rec);
  for (UserId u : users) {
    const auto& rated = train.RatedItems(u);
    const std::size_t cap = std::min(k, train.num_items() - rated.size());
    std::vector<ItemId> recs;
    if (cap > 0) recs = ranker.TopK(u, rated, cap);
    out.push_back(model::OrderItems(u, train.UserRatings(u), recs));
  }
  return out;
}

AttackerBatch MakeAttackerBatch(std::span<const ItemListSequence> lists,
                                std::size_t max_sequence) {
  AttackerBatch batch;
  for (const auto& s : lists) {
    batch.users.push_back(s.user);
    batch.sequences.push_back(s.Tail(max_sequence));
  }
  return batch;
}

JointTerms JointObjective(TrainState& state, nn::Tape& tape, const TrainConfig& cfg,
                          std::span<const Triplet> triplets, std::size_t batch_users,
                          const AttackerBatch& att_batch, const data::AttributeTable& labels) {
  JointTerms terms;
  model::Recommender::Vars vars = state.rec.Bind(tape, true);
  terms.rec = model::BprLoss(vars, triplets, batch_users, cfg.lambda);
  terms.objective = terms.rec;
  if (cfg.alpha > 0.0 && !att_batch.users.empty()) {
    terms.att = model::AttackerLoss(state.att, tape, false, vars, att_batch, labels,
                                    cfg.attributes);
    terms.objective = nn::Sub(terms.rec, nn::Scale(terms.att, cfg.alpha));
  }
  return terms;
}

StepResult RecommenderUpdate(TrainState& state, const TrainConfig& cfg,
                             std::span<const Triplet> triplets, std::size_t batch_users,
                             const AttackerBatch& att_batch, const data::AttributeTable& labels) {
  nn::Tape tape;
  JointTerms terms = JointObjective(state, tape, cfg, triplets, batch_users, att_batch, labels);
  StepResult r;
  r.rec_loss = terms.rec.value().item();
  r.att_loss = terms.att.valid() ? terms.att.value().item() : 0.0;
  CheckFinite(r.rec_loss, "recommender loss", state);
  CheckFinite(r.att_loss, "attacker loss", state);
  state.rec.params().ZeroGrad();
  tape.Backward(terms.objective);
  state.rec_opt.Step(state.rec.params(), model::Recommender::kPrefix);
  return r;
}

double AttackerUpdate(TrainState& state, const TrainConfig& cfg, const AttackerBatch& att_batch,
                      const data::AttributeTable& labels) {
  nn::Tape tape;
  model::Recommender::Vars vars = state.rec.Bind(tape, false);
  nn::Var loss =
      model::AttackerLoss(state.att, tape, true, vars, att_batch, labels, cfg.attributes);
  const double value = loss.value().item();
  CheckFinite(value, "attacker loss", state);
  nn::Var objective = loss;
  if (cfg.lambda > 0.0) {
    objective = nn::Add(loss, nn::Scale(model::AttackerL2(state.att, tape, cfg.attributes),
                                        cfg.lambda));
  }
  state.att.params().ZeroGrad();
  tape.Backward(objective);
  state.att_opt.Step(state.att.params(), AttackerPrefixes(cfg));
  return value;
}

TrainState Fit(const TrainConfig& cfg, const data::RatingDataset& train,
               const data::AttributeTable& labels, const EpochCallback& on_epoch) {
  return RunLoop(cfg, train, &labels, on_epoch);
}

TrainState FitRecommenderOnly(const TrainConfig& cfg, const data::RatingDataset& train,
                              const EpochCallback& on_epoch) {
  TrainConfig rec_only = cfg;
  rec_only.alpha = 0.0;
  return RunLoop(rec_only, train, nullptr, on_epoch);
}

std::string ConfigJson(const TrainConfig& cfg) {
  json attrs = json::array();
  for (Attribute a : cfg.attributes) attrs.push_back(std::string(data::AttributeName(a)));
  json j = {
      {"alpha", cfg.alpha},
      {"lambda", cfg.lambda},
      {"learning_rate", cfg.learning_rate},
      {"batch_size", cfg.batch_size},
      {"epochs", cfg.epochs},
      {"train_k", cfg.train_k},
      {"seed", cfg.seed},
      {"attributes", attrs},
      {"negatives_per_positive", cfg.negatives_per_positive},
      {"embed_dim", cfg.embed_dim},
      {"rec_hidden", cfg.rec_hidden},
      {"att_hidden", cfg.att_hidden},
      {"max_sequence", cfg.max_sequence},
      {"attacker_init",
       cfg.attacker_init == model::AttackerInit::kFanInScaled ? "fan_in_scaled" : "unit_uniform"},
  };
  return j.dump();
}

std::string TrainingLogJson(const TrainConfig& cfg, const TrainState& state) {
  json epochs = json::array();
  for (const EpochLog& e : state.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"rec_loss", e.rec_loss},
                      {"att_loss", e.att_loss},
                      {"seconds", e.seconds}});
  }
  json j = {{"config", json::parse(ConfigJson(cfg))},
            {"seed", cfg.seed},
            {"epochs", epochs},
            {"rec_steps", state.rec_opt.step_count()},
            {"att_steps", state.att_opt.step_count()}};
  return j.dump(2);
}

void SaveCheckpoint(const TrainState& state, const std::filesystem::path& path) {
  nn::ParameterSet all;
  for (const auto& [name, t] : state.rec.params()) all.Add(name, t);
  for (const auto& [name, t] : state.att.params()) all.Add(name, t);
  all.Save(path);
}

model::Recommender LoadRecommender(const std::filesystem::path& path) {
  return model::Recommender(nn::ParameterSet::Load(path));
}

}  // namespace rap::train
