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

#include "rap/experiment/experiment.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "rap/baselines/perturbation.h"
#include "rap/errors.h"
#include "rap/eval/metrics.h"
#include "rap/model/attacker.h"
#include "rap/train/adversarial_trainer.h"

namespace rap::experiment {

using data::ItemId;
using data::RatingDataset;

namespace {

double Since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FormatAlpha(double alpha) {
  std::ostringstream os;
  os << alpha;
  return os.str();
}

}  // namespace

std::string MethodLabel(const std::string& method) {
  if (method == "original") return "Original";
  if (method == "rap") return "RAP";
  if (method == "blurme") return "BlurMe";
  if (method == "ldp") return "LDP";
  throw ValidationError("unknown method '" + method + "'");
}

Corpus LoadCorpus(const ExperimentConfig& cfg) {
  if (cfg.ratings_path.empty() || cfg.users_path.empty()) {
    throw ValidationError("data paths not configured (set data_dir or ratings/users)");
  }
  Corpus c;
  c.ratings = data::LoadRatings(cfg.ratings_path);
  c.attributes = data::LoadUserAttributes(cfg.users_path, c.ratings.user_ids());
  return c;
}

Defense RunBaseline(const std::string& method, const ExperimentConfig& cfg,
                    const train::TrainConfig& train_cfg, const BaselineInputs& in) {
  if (!in.train || !in.visible_labels) throw ValidationError("baseline inputs incomplete");
  if (method == "rap") {
    return Defense{train::Fit(train_cfg, *in.train, *in.visible_labels), *in.train, train_cfg};
  }
  RatingDataset data;
  if (method == "original") {
    data = *in.train;
  } else if (method == "blurme") {
    if (!in.own_labels) throw ValidationError("BlurMe needs the users' own labels");
    baselines::BlurMeOptions opt;
    opt.fraction = cfg.blurme_fraction;
    opt.seed = train_cfg.seed;
    data = baselines::BlurMeObfuscate(*in.train, *in.visible_labels, *in.own_labels,
                                      in.protected_users, in.blurme_attribute, opt);
  } else if (method == "ldp") {
    data = baselines::LdpPerturb(*in.train, cfg.ldp_epsilon, in.protected_users, train_cfg.seed);
  } else {
    throw ValidationError("unknown method '" + method + "'");
  }
  train::TrainConfig rec_only = train_cfg;
  rec_only.alpha = 0.0;
  train::TrainState st = train::FitRecommenderOnly(rec_only, data);
  return Defense{std::move(st), std::move(data), rec_only};
}

std::vector<ItemId> Recommend(const model::Recommender::Ranker& ranker,
                              const RatingDataset& known, UserId user, std::size_t k) {
  const auto& rated = known.RatedItems(user);
  return ranker.TopK(user, rated, std::min(k, known.num_items() - rated.size()));
}

ExperimentRunner::ExperimentRunner(ExperimentConfig cfg, Corpus corpus)
    : cfg_(std::move(cfg)), corpus_(std::move(corpus)) {
  cfg_.Validate();
}

void ExperimentRunner::Note(const std::string& msg) const {
  if (progress_) progress_(msg);
}

train::TrainConfig ExperimentRunner::TrainConfigFor(const CellSpec& cell) const {
  train::TrainConfig t = cfg_.train;
  t.seed = cell.seed;
  t.alpha = cell.method == "rap" ? cell.alpha : 0.0;
  t.attributes = cell.attributes;
  return t;
}

ExperimentRunner::Utility ExperimentRunner::EvaluateUtility(const model::Recommender& rec,
                                                            const RatingDataset& known,
                                                            const data::RecSplit& split,
                                                            std::size_t k) {
  const model::Recommender::Ranker ranker(rec);
  Utility u;
  double p = 0.0, r = 0.0;
  for (std::size_t h = 0; h < known.num_users(); ++h) {
    const auto uid = static_cast<UserId>(h);
    if (!split.IsEvaluable(uid)) continue;
    const std::vector<ItemId> top = Recommend(ranker, known, uid, k);
    if (top.size() < k) throw ValidationError("fewer than K unrated items for a user");
    p += eval::PrecisionAtK(split.heldout[h], top, k);
    r += eval::RecallAtK(split.heldout[h], top, k);
    ++u.evaluable;
  }
  const double n_all = static_cast<double>(known.num_users());
  const double n_eval = static_cast<double>(u.evaluable);
  u.precision = p / n_all;
  u.recall = r / n_all;
  u.precision_eval = u.evaluable ? p / n_eval : 0.0;
  u.recall_eval = u.evaluable ? r / n_eval : 0.0;
  return u;
}

void ExperimentRunner::RunUtility(const CellSpec& cell, CellResult& out) {
  const RatingDataset& ds = corpus_.ratings;
  const data::RecSplit split = data::SplitRecommendation(ds, cell.l, cell.seed);
  const data::AttackSplit partition =
      data::SplitAttacker(ds, cfg_.train_fraction, cell.l, cell.seed);
  const data::AttributeTable visible = corpus_.attributes.WithHidden(partition.test_users);
  std::vector<UserId> everyone(ds.num_users());
  for (std::size_t u = 0; u < everyone.size(); ++u) everyone[u] = static_cast<UserId>(u);

  BaselineInputs in;
  in.train = &split.train;
  in.visible_labels = &visible;
  in.own_labels = &corpus_.attributes;
  in.protected_users = everyone;

  const train::TrainConfig tcfg = TrainConfigFor(cell);
  // BlurMe is deployed per attribute; its utility is the mean over them.
  std::vector<Attribute> passes = {Attribute::kGender};
  if (cell.method == "blurme") passes = cell.attributes;
  Utility sum;
  for (Attribute a : passes) {
    in.blurme_attribute = a;
    Defense d = RunBaseline(cell.method, cfg_, tcfg, in);
    const Utility u = EvaluateUtility(d.model(), d.data, split, cfg_.top_k);
    sum.precision += u.precision;
    sum.recall += u.recall;
    sum.precision_eval += u.precision_eval;
    sum.recall_eval += u.recall_eval;
    sum.evaluable = u.evaluable;
  }
  const double n = static_cast<double>(passes.size());
  out.precision = sum.precision / n;
  out.recall = sum.recall / n;
  out.precision_eval = sum.precision_eval / n;
  out.recall_eval = sum.recall_eval / n;
  out.evaluable_users = sum.evaluable;
  out.excluded_users = split.excluded_users.size();
}

const eval::MlpAdversary& ExperimentRunner::Adversary(const data::AttackSplit& split,
                                                      Attribute attribute) {
  // The partition, and hence the adversary, does not depend on l.
  const auto key = std::make_tuple(split.seed, 0, static_cast<int>(attribute));
  auto it = adversaries_.find(key);
  if (it != adversaries_.end()) return *it->second;
  // The attacker knows the training users' intact profiles and labels only.
  const data::AttributeTable visible = corpus_.attributes.WithHidden(split.test_users);
  std::vector<std::vector<ItemId>> lists;
  for (UserId u : split.train_users) lists.push_back(corpus_.ratings.RatedItems(u));
  eval::AdversaryOptions opt = cfg_.adversary;
  opt.seed = DeriveSeed(split.seed, {kStreamAdversary, static_cast<std::uint64_t>(attribute)});
  auto model = std::make_unique<eval::MlpAdversary>(eval::TrainAdversary(
      lists, split.train_users, visible, attribute, corpus_.ratings.num_items(), opt));
  return *adversaries_.emplace(key, std::move(model)).first->second;
}

void ExperimentRunner::RunPrivacy(const CellSpec& cell, CellResult& out) {
  const RatingDataset& ds = corpus_.ratings;
  const data::AttackSplit split = data::SplitAttacker(ds, cfg_.train_fraction, cell.l, cell.seed);
  const data::AttributeTable visible = corpus_.attributes.WithHidden(split.test_users);

  BaselineInputs in;
  in.train = &split.observed;
  in.visible_labels = &visible;
  in.own_labels = &corpus_.attributes;
  in.protected_users = split.test_users;
  const train::TrainConfig tcfg = TrainConfigFor(cell);

  auto score = [&](const Defense& d, Attribute a) {
    const model::Recommender::Ranker ranker(d.model());
    std::vector<std::vector<ItemId>> lists;
    std::vector<int> labels;
    for (UserId u : split.test_users) {
      const std::vector<ItemId> recs = Recommend(ranker, d.data, u, static_cast<std::size_t>(cell.l));
      lists.push_back(model::OrderItems(u, d.data.UserRatings(u), recs).items);
      labels.push_back(corpus_.attributes.Label(u, a));
    }
    return eval::EvaluateAttack(Adversary(split, a), lists, labels, a, cell.seed).auc;
  };

  if (cell.method == "blurme") {
    for (Attribute a : data::kAllAttributes) {
      in.blurme_attribute = a;
      Defense d = RunBaseline(cell.method, cfg_, tcfg, in);
      out.auc[static_cast<std::size_t>(a)] = score(d, a);
    }
  } else {
    Defense d = RunBaseline(cell.method, cfg_, tcfg, in);
    for (Attribute a : data::kAllAttributes) out.auc[static_cast<std::size_t>(a)] = score(d, a);
  }
  out.short_profile_users = split.short_profile_users.size();
}

std::string ExperimentRunner::CacheKey(const CellSpec& cell, const char* half) const {
  FlatConfig f = cfg_.ToFlat();
  for (const char* k : {"seeds", "l_values", "methods", "alpha_values", "cache_dir",
                        "output_dir", "alpha", "attributes"}) {
    f.erase(k);
  }
  std::ostringstream os;
  os << half << "|" << cell.method << "|" << cell.l << "|" << cell.seed << "|"
     << (cell.method == "rap" ? FormatAlpha(cell.alpha) : "0") << "|"
     << FormatAttributeList(cell.attributes) << "\n"
     << FormatFlatConfig(f);
  return os.str();
}

bool ExperimentRunner::LoadCached(const std::string& key, CellResult& out) const {
  if (cfg_.cache_dir.empty()) return false;
  std::ostringstream name;
  name << std::hex << std::setw(16) << std::setfill('0') << Fnv1a(key) << ".json";
  std::ifstream in(cfg_.cache_dir / name.str());
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const nlohmann::json j = nlohmann::json::parse(ss.str());
    if (j.at("key").get<std::string>() != key) return false;
    out = CellFromJson(j.at("cell").dump());
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void ExperimentRunner::StoreCached(const std::string& key, const CellResult& cell) const {
  if (cfg_.cache_dir.empty()) return;
  std::filesystem::create_directories(cfg_.cache_dir);
  std::ostringstream name;
  name << std::hex << std::setw(16) << std::setfill('0') << Fnv1a(key) << ".json";
  const auto path = cfg_.cache_dir / name.str();
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << nlohmann::json{{"key", key}, {"cell", nlohmann::json::parse(CellToJson(cell))}}.dump();
  }
  std::filesystem::rename(tmp, path);
}

CellResult ExperimentRunner::RunCell(const CellSpec& cell) {
  CellResult out;
  out.method = cell.label.empty() ? MethodLabel(cell.method) : cell.label;
  out.l = cell.l;
  out.seed = cell.seed;
  out.alpha = cell.method == "rap" ? cell.alpha : 0.0;

  if (cell.utility) {
    const std::string key = CacheKey(cell, "utility");
    CellResult part;
    if (!LoadCached(key, part)) {
      Note("utility  " + out.method + " l=" + std::to_string(cell.l) +
           " seed=" + std::to_string(cell.seed));
      const auto start = std::chrono::steady_clock::now();
      RunUtility(cell, part);
      part.seconds = Since(start);
      StoreCached(key, part);
    }
    out.precision = part.precision;
    out.recall = part.recall;
    out.precision_eval = part.precision_eval;
    out.recall_eval = part.recall_eval;
    out.evaluable_users = part.evaluable_users;
    out.excluded_users = part.excluded_users;
    out.seconds += part.seconds;
  }
  if (cell.privacy) {
    const std::string key = CacheKey(cell, "privacy");
    CellResult part;
    if (!LoadCached(key, part)) {
      Note("privacy  " + out.method + " l=" + std::to_string(cell.l) +
           " seed=" + std::to_string(cell.seed));
      const auto start = std::chrono::steady_clock::now();
      RunPrivacy(cell, part);
      part.seconds = Since(start);
      StoreCached(key, part);
    }
    out.auc = part.auc;
    out.short_profile_users = part.short_profile_users;
    out.seconds += part.seconds;
  }
  return out;
}

ExperimentReport ExperimentRunner::RunTable1() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "table1";
  for (const auto& [k, v] : cfg_.ToFlat()) r.config[k] = v;
  for (int l : cfg_.l_values) {
    for (const std::string& m : cfg_.methods) {
      for (std::uint64_t seed : cfg_.seeds) {
        CellSpec s;
        s.method = m;
        s.l = l;
        s.seed = seed;
        s.alpha = cfg_.train.alpha;
        s.attributes = cfg_.train.attributes;
        r.cells.push_back(RunCell(s));
      }
    }
  }
  r.seconds = Since(start);
  return r;
}

ExperimentReport ExperimentRunner::RunAlphaSweep() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "alpha_sweep";
  for (const auto& [k, v] : cfg_.ToFlat()) r.config[k] = v;
  const int l = cfg_.l_values.front();
  std::vector<double> alphas = {0.0};
  alphas.insert(alphas.end(), cfg_.alpha_values.begin(), cfg_.alpha_values.end());
  for (double a : alphas) {
    for (std::uint64_t seed : cfg_.seeds) {
      CellSpec s;
      s.method = a == 0.0 ? "original" : "rap";
      s.label = "alpha=" + FormatAlpha(a);
      s.l = l;
      s.seed = seed;
      s.alpha = a;
      s.attributes = cfg_.train.attributes;
      r.cells.push_back(RunCell(s));
    }
  }
  r.seconds = Since(start);
  return r;
}

ExperimentReport ExperimentRunner::RunVariants() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "variants";
  for (const auto& [k, v] : cfg_.ToFlat()) r.config[k] = v;
  const int l = cfg_.l_values.front();
  struct Variant {
    const char* label;
    std::vector<Attribute> attrs;
  };
  const std::vector<Variant> variants = {
      {"RAP", {data::kAllAttributes.begin(), data::kAllAttributes.end()}},
      {"RAPAge", {Attribute::kAge}},
      {"RAPGen", {Attribute::kGender}},
      {"RAPOcc", {Attribute::kOccupation}}};
  for (const Variant& v : variants) {
    for (std::uint64_t seed : cfg_.seeds) {
      CellSpec s;
      s.method = "rap";
      s.label = v.label;
      s.l = l;
      s.seed = seed;
      s.alpha = cfg_.train.alpha;
      s.attributes = v.attrs;
      r.cells.push_back(RunCell(s));
    }
  }
  r.seconds = Since(start);
  return r;
}

}  // namespace rap::experiment
