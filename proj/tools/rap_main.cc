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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rap/data/movielens.h"
#include "rap/data/splits.h"
#include "rap/errors.h"
#include "rap/eval/adversary.h"
#include "rap/experiment/config.h"
#include "rap/experiment/experiment.h"
#include "rap/experiment/report.h"
#include "rap/model/attacker.h"
#include "rap/train/adversarial_trainer.h"

namespace fs = std::filesystem;
using namespace rap;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string data_dir;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Flat key = value config file");
  app->add_option("--data-dir", c.data_dir, "Directory with u.data and u.user");
  app->add_option("--set", c.sets, "Override a config key (key=value), repeatable");
}

experiment::ExperimentConfig BuildConfig(const Common& c) {
  experiment::ExperimentConfig cfg;
  if (!c.config.empty()) cfg.Apply(experiment::LoadFlatConfig(c.config));
  if (!c.data_dir.empty()) cfg.Set("data_dir", c.data_dir);
  for (const std::string& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got " + kv);
    cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cfg.ratings_path.empty()) cfg.Set("data_dir", "data/ml-100k");
  return cfg;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A ratings file in raw ids, re-indexed with the corpus id maps.
data::RatingDataset LoadKnown(const fs::path& path, const data::RatingDataset& corpus) {
  const data::RatingDataset raw = data::LoadRatings(path);
  std::vector<data::Rating> ratings;
  ratings.reserve(raw.num_ratings());
  for (data::Rating r : raw.ratings()) {
    r.user = corpus.user_ids().Encode(raw.user_ids().Decode(r.user));
    r.item = corpus.item_ids().Encode(raw.item_ids().Decode(r.item));
    ratings.push_back(r);
  }
  return data::RatingDataset(corpus.num_users(), corpus.num_items(), std::move(ratings),
                             corpus.user_ids(), corpus.item_ids());
}

int PrepareData(const std::string& ratings_path, const std::string& users_path,
                const std::string& out_dir, int l, std::uint64_t seed, double fraction) {
  const data::RatingDataset ds = data::LoadRatings(ratings_path);
  const data::AttributeTable attrs = data::LoadUserAttributes(users_path, ds.user_ids());
  fs::create_directories(out_dir);
  data::WriteRatingsTsv(ds, fs::path(out_dir) / "u.data");
  fs::copy_file(users_path, fs::path(out_dir) / "u.user", fs::copy_options::overwrite_existing);
  const data::RecSplit rec = data::SplitRecommendation(ds, l, seed);
  const data::AttackSplit att = data::SplitAttacker(ds, fraction, l, seed);
  WriteFile(fs::path(out_dir) / "rec_split.json", data::RecSplitToJson(rec));
  WriteFile(fs::path(out_dir) / "attack_split.json", data::AttackSplitToJson(att));

  std::size_t min_profile = ds.num_items();
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    min_profile = std::min(min_profile, ds.RatedItems(static_cast<data::UserId>(u)).size());
  }
  json classes;
  for (data::Attribute a : data::kAllAttributes) {
    classes[std::string(data::AttributeName(a))] = attrs.ClassCounts(a);
  }
  json summary = {{"users", ds.num_users()},
                  {"items", ds.num_items()},
                  {"ratings", ds.num_ratings()},
                  {"min_profile", min_profile},
                  {"class_counts", classes},
                  {"l", l},
                  {"seed", seed},
                  {"excluded_users", rec.excluded_users.size()},
                  {"degenerate_users", rec.degenerate_users.size()},
                  {"attack_train_users", att.train_users.size()},
                  {"attack_test_users", att.test_users.size()},
                  {"short_profile_users", att.short_profile_users.size()}};
  WriteFile(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct TrainArgs {
  std::string method = "rap";
  std::string protocol = "rec";
  std::string blurme_attribute = "gender";
  std::string out = "run";
  double alpha = NAN;
  int l = 35;
  std::uint64_t seed = 1;
};

int Train(const Common& common, const TrainArgs& a) {
  experiment::ExperimentConfig cfg = BuildConfig(common);
  if (!std::isnan(a.alpha)) cfg.train.alpha = a.alpha;
  cfg.train.seed = a.seed;
  cfg.Validate();
  if (a.protocol != "rec" && a.protocol != "attack") {
    throw ValidationError("--protocol must be rec or attack");
  }
  const experiment::Corpus corpus = experiment::LoadCorpus(cfg);
  const data::RatingDataset& ds = corpus.ratings;
  const data::AttackSplit attack = data::SplitAttacker(ds, cfg.train_fraction, a.l, a.seed);
  const data::AttributeTable visible = corpus.attributes.WithHidden(attack.test_users);
  train::TrainConfig tcfg = cfg.train;
  if (a.method != "rap") tcfg.alpha = 0.0;

  experiment::BaselineInputs in;
  in.visible_labels = &visible;
  in.own_labels = &corpus.attributes;
  in.blurme_attribute = data::ParseAttribute(a.blurme_attribute);
  std::vector<data::UserId> everyone(ds.num_users());
  for (std::size_t u = 0; u < everyone.size(); ++u) everyone[u] = static_cast<data::UserId>(u);

  data::RecSplit rec_split;
  std::string manifest;
  if (a.protocol == "rec") {
    rec_split = data::SplitRecommendation(ds, a.l, a.seed);
    in.train = &rec_split.train;
    in.protected_users = everyone;
    manifest = data::RecSplitToJson(rec_split);
  } else {
    in.train = &attack.observed;
    in.protected_users = attack.test_users;
    manifest = data::AttackSplitToJson(attack);
  }
  std::cerr << "training " << a.method << " (" << a.protocol << " protocol, l=" << a.l
            << ", seed=" << a.seed << ")\n";
  experiment::Defense d = experiment::RunBaseline(a.method, cfg, tcfg, in);

  const fs::path out(a.out);
  fs::create_directories(out);
  train::SaveCheckpoint(d.state, out / "checkpoint.bin");
  WriteFile(out / "train_log.json", train::TrainingLogJson(d.config, d.state) + "\n");
  WriteFile(out / "split.json", manifest);
  data::WriteRatingsTsv(d.data, out / "train.tsv");

  json metrics = {{"method", a.method}, {"protocol", a.protocol}, {"l", a.l}, {"seed", a.seed}};
  if (a.protocol == "rec") {
    const auto u = experiment::ExperimentRunner::EvaluateUtility(d.model(), d.data, rec_split,
                                                                 cfg.top_k);
    metrics["p_at_k"] = u.precision;
    metrics["r_at_k"] = u.recall;
    metrics["p_at_k_evaluable"] = u.precision_eval;
    metrics["r_at_k_evaluable"] = u.recall_eval;
    metrics["evaluable_users"] = u.evaluable;
    metrics["excluded_users"] = rec_split.excluded_users.size();
  }
  WriteFile(out / "metrics.json", metrics.dump(2) + "\n");
  std::cout << metrics.dump(2) << "\n";
  return 0;
}

fs::path DefaultTrainFile(const std::string& checkpoint, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(checkpoint).parent_path() / "train.tsv";
}

int Recommend(const Common& common, const std::string& checkpoint, std::int64_t raw_user,
              std::size_t k, const std::string& train_path) {
  const experiment::ExperimentConfig cfg = BuildConfig(common);
  const data::RatingDataset corpus = data::LoadRatings(cfg.ratings_path);
  const model::Recommender rec = train::LoadRecommender(checkpoint);
  if (rec.shape().num_users != corpus.num_users() || rec.shape().num_items != corpus.num_items()) {
    throw ValidationError("checkpoint does not match the dataset dimensions");
  }
  const data::RatingDataset known = LoadKnown(DefaultTrainFile(checkpoint, train_path), corpus);
  const data::UserId user = corpus.user_ids().Encode(raw_user);
  const auto& rated = known.RatedItems(user);
  if (k == 0 || k > corpus.num_items() - rated.size()) {
    throw ValidationError("--k must lie in 1.." + std::to_string(corpus.num_items() - rated.size()));
  }
  const model::Recommender::Ranker ranker(rec);
  const std::vector<double> scores = ranker.ScoreAll(user);
  std::cout << "user,rank,item,score\n" << std::setprecision(10);
  std::size_t rank = 1;
  for (data::ItemId j : ranker.TopK(user, rated, k)) {
    std::cout << raw_user << "," << rank++ << "," << corpus.item_ids().Decode(j) << ","
              << scores[static_cast<std::size_t>(j)] << "\n";
  }
  return 0;
}

int AttackEval(const Common& common, const std::string& checkpoint, const std::string& split_path,
               const std::string& train_path, std::uint64_t seed_override) {
  const experiment::ExperimentConfig cfg = BuildConfig(common);
  const experiment::Corpus corpus = experiment::LoadCorpus(cfg);
  const data::AttackSplit split = data::AttackSplitFromJson(corpus.ratings, ReadFile(split_path));
  const model::Recommender rec = train::LoadRecommender(checkpoint);
  const fs::path known_path = DefaultTrainFile(checkpoint, train_path);
  const data::RatingDataset known =
      fs::exists(known_path) ? LoadKnown(known_path, corpus.ratings) : split.observed;
  const std::uint64_t seed = seed_override ? seed_override : split.seed;

  const data::AttributeTable visible = corpus.attributes.WithHidden(split.test_users);
  std::vector<std::vector<data::ItemId>> train_lists;
  for (data::UserId u : split.train_users) train_lists.push_back(corpus.ratings.RatedItems(u));
  const model::Recommender::Ranker ranker(rec);
  std::vector<std::vector<data::ItemId>> test_lists;
  for (data::UserId u : split.test_users) {
    const auto recs = experiment::Recommend(ranker, known, u, static_cast<std::size_t>(split.l));
    test_lists.push_back(model::OrderItems(u, known.UserRatings(u), recs).items);
  }
  std::vector<eval::AttackResult> results;
  for (data::Attribute a : data::kAllAttributes) {
    eval::AdversaryOptions opt = cfg.adversary;
    opt.seed = DeriveSeed(seed, {kStreamAdversary, static_cast<std::uint64_t>(a)});
    const eval::MlpAdversary adv = eval::TrainAdversary(
        train_lists, split.train_users, visible, a, corpus.ratings.num_items(), opt);
    std::vector<int> labels;
    for (data::UserId u : split.test_users) labels.push_back(corpus.attributes.Label(u, a));
    results.push_back(eval::EvaluateAttack(adv, test_lists, labels, a, seed));
  }
  std::cout << eval::AttackResultsJson(results) << "\n";
  return 0;
}

int RunExperiment(const Common& common, const std::string& which, const std::string& out_dir,
                  const std::string& cache_dir) {
  experiment::ExperimentConfig cfg = BuildConfig(common);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
  experiment::Corpus corpus = experiment::LoadCorpus(cfg);
  experiment::ExperimentRunner runner(cfg, std::move(corpus));
  runner.set_progress([](const std::string& msg) { std::cerr << "[rap] " << msg << "\n"; });
  experiment::ExperimentReport report = which == "table1"        ? runner.RunTable1()
                                        : which == "alpha_sweep" ? runner.RunAlphaSweep()
                                                                 : runner.RunVariants();
  fs::create_directories(cfg.output_dir);
  WriteFile(cfg.output_dir / (which + ".json"), experiment::ReportToJson(report) + "\n");
  WriteFile(cfg.output_dir / (which + ".csv"), experiment::ReportToCsv(report, false));
  WriteFile(cfg.output_dir / (which + "_mean.csv"), experiment::ReportToCsv(report, true));
  std::cout << experiment::FormatTable(report);
  std::cerr << "[rap] wrote " << (cfg.output_dir / which).string() << ".{json,csv}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-aware recommendation trained against an attribute-inference attacker"};
  app.require_subcommand(1);

  std::string ratings, users, prep_out = "data/prepared";
  int prep_l = 35;
  std::uint64_t prep_seed = 1;
  double prep_fraction = 0.8;
  auto* prep = app.add_subcommand("prepare-data", "Validate MovieLens files and write split manifests");
  prep->add_option("--ratings", ratings, "u.data path")->required();
  prep->add_option("--users", users, "u.user path")->required();
  prep->add_option("--out", prep_out, "Output directory");
  prep->add_option("--l", prep_l, "Held-out items per user");
  prep->add_option("--seed", prep_seed, "Split seed");
  prep->add_option("--train-fraction", prep_fraction, "Attack-split training fraction");

  Common train_common;
  TrainArgs targs;
  auto* train_cmd = app.add_subcommand("train", "Train one defense and save a checkpoint");
  AddCommon(train_cmd, train_common);
  train_cmd->add_option("--method", targs.method, "rap | original | blurme | ldp")
      ->check(CLI::IsMember({"rap", "original", "blurme", "ldp"}));
  train_cmd->add_option("--alpha", targs.alpha, "Attacker weight (rap only)");
  train_cmd->add_option("--l", targs.l, "Held-out / removed items per user");
  train_cmd->add_option("--seed", targs.seed, "Run seed");
  train_cmd->add_option("--protocol", targs.protocol, "rec | attack")
      ->check(CLI::IsMember({"rec", "attack"}));
  train_cmd->add_option("--blurme-attribute", targs.blurme_attribute, "Attribute BlurMe targets");
  train_cmd->add_option("--out", targs.out, "Output directory");

  Common rec_common;
  std::string rec_ckpt, rec_train;
  std::int64_t rec_user = 0;
  std::size_t rec_k = 35;
  auto* rec_cmd = app.add_subcommand("recommend", "Print a user's top-K list as CSV");
  AddCommon(rec_cmd, rec_common);
  rec_cmd->add_option("--checkpoint", rec_ckpt, "Checkpoint from train")->required();
  rec_cmd->add_option("--user", rec_user, "Raw user id")->required();
  rec_cmd->add_option("--k", rec_k, "List length");
  rec_cmd->add_option("--train", rec_train, "Known ratings (default: train.tsv beside checkpoint)");

  Common att_common;
  std::string att_ckpt, att_split, att_train;
  std::uint64_t att_seed = 0;
  auto* att_cmd = app.add_subcommand("attack-eval", "Run the external attacker against a checkpoint");
  AddCommon(att_cmd, att_common);
  att_cmd->add_option("--checkpoint", att_ckpt, "Checkpoint from train --protocol attack")->required();
  att_cmd->add_option("--split", att_split, "Attack split manifest")->required();
  att_cmd->add_option("--train", att_train, "Known ratings (default: train.tsv beside checkpoint)");
  att_cmd->add_option("--seed", att_seed, "Adversary seed (default: the split seed)");

  struct Exp {
    const char* name;
    const char* key;
    const char* help;
    Common common;
    std::string out, cache;
    CLI::App* cmd = nullptr;
  };
  std::vector<Exp> exps = {
      {"table1", "table1", "Methods x l x seeds privacy/utility table", {}, {}, {}},
      {"alpha-sweep", "alpha_sweep", "AUC and P@K across attacker weights", {}, {}, {}},
      {"variants", "variants", "RAP against single-attribute variants", {}, {}, {}}};
  for (Exp& e : exps) {
    e.cmd = app.add_subcommand(e.name, e.help);
    AddCommon(e.cmd, e.common);
    e.cmd->add_option("--out", e.out, "Output directory (overrides output_dir)");
    e.cmd->add_option("--cache", e.cache, "Cell cache directory (overrides cache_dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*prep) return PrepareData(ratings, users, prep_out, prep_l, prep_seed, prep_fraction);
    if (*train_cmd) return Train(train_common, targs);
    if (*rec_cmd) return Recommend(rec_common, rec_ckpt, rec_user, rec_k, rec_train);
    if (*att_cmd) return AttackEval(att_common, att_ckpt, att_split, att_train, att_seed);
    for (Exp& e : exps) {
      if (*e.cmd) return RunExperiment(e.common, e.key, e.out, e.cache);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
