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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "json.hpp"
#include "rap/errors.h"
#include "rap/eval/adversary.h"
#include "rap/eval/metrics.h"
#include "rap/rng.h"

namespace rap::eval {
namespace {

using data::AttributeTable;

// Fraction of (positive, negative) pairs ranked correctly, ties counted half.
double PairCountAuc(const std::vector<double>& scores, const std::vector<std::uint8_t>& pos) {
  double good = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (!pos[i] || pos[j]) continue;
      pairs += 1;
      good += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
    }
  }
  return good / pairs;
}

struct Toy {
  std::vector<std::vector<ItemId>> lists;
  std::vector<UserId> users;
  AttributeTable labels;
};

// Item 0 present exactly for gender-1 users; other items random.
Toy SeparableToy(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Toy toy;
  std::vector<std::array<int, 3>> rows;
  for (std::size_t u = 0; u < n; ++u) {
    const int g = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
    rows.push_back({g, 0, 0});
    std::vector<ItemId> items(m - 1);
    std::iota(items.begin(), items.end(), 1);
    std::shuffle(items.begin(), items.end(), rng);
    items.resize(8);
    if (g == 1) items.push_back(0);
    toy.lists.push_back(items);
    toy.users.push_back(static_cast<UserId>(u));
  }
  toy.labels = AttributeTable(rows);
  return toy;
}

TEST(Featurize, Examples) {
  const auto empty = Featurize({}, 5);
  EXPECT_EQ(empty, std::vector<double>(5, 0.0));
  const std::vector<ItemId> ends = {0, 4};
  const auto x = Featurize(ends, 5);
  EXPECT_EQ(std::accumulate(x.begin(), x.end(), 0.0), 2.0);
  EXPECT_EQ(x[0], 1.0);
  EXPECT_EQ(x[4], 1.0);
  const std::vector<ItemId> some = {3, 1, 7, 2};
  const auto y = Featurize(some, 9);
  EXPECT_EQ(std::count(y.begin(), y.end(), 1.0), 4);
  for (ItemId j : some) EXPECT_EQ(y[static_cast<std::size_t>(j)], 1.0);
}

TEST(Featurize, OutOfRange) {
  const std::vector<ItemId> bad = {5};
  EXPECT_THROW(Featurize(bad, 5), ValidationError);
  const std::vector<ItemId> negative = {-1};
  EXPECT_THROW(Featurize(negative, 5), ValidationError);
}

TEST(BinaryAuc, PerfectConstantAndHandCase) {
  const std::vector<std::uint8_t> pos = {1, 0, 1, 0};
  EXPECT_EQ(BinaryAuc(std::vector<double>{0.9, 0.1, 0.8, 0.2}, pos), 1.0);
  EXPECT_EQ(BinaryAuc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, pos), 0.5);
  const std::vector<double> hand = {0.4, 0.4, 0.7, 0.9};
  EXPECT_NEAR(BinaryAuc(hand, pos), PairCountAuc(hand, pos), 1e-15);
  EXPECT_NEAR(BinaryAuc(hand, pos), 0.375, 1e-15);
}

TEST(BinaryAuc, MatchesPairCountingOnRandomInputs) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 17);
    std::vector<double> s(n);
    std::vector<std::uint8_t> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::floor(std::uniform_real_distribution<double>(0, 5)(rng));
      p[i] = static_cast<std::uint8_t>(i % 2);
    }
    EXPECT_NEAR(BinaryAuc(s, p), PairCountAuc(s, p), 1e-12) << trial;
  }
}

TEST(BinaryAuc, SingleClassIsUndefined) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(BinaryAuc(s, std::vector<std::uint8_t>{1, 1}), ValidationError);
  EXPECT_THROW(BinaryAuc(s, std::vector<std::uint8_t>{0, 0}), ValidationError);
}

TEST(MicroAuc, PoolsUserClassPairs) {
  const std::vector<std::vector<double>> probs = {
      {0.7, 0.2, 0.1}, {0.3, 0.3, 0.4}, {0.1, 0.8, 0.1}, {0.5, 0.25, 0.25}};
  const std::vector<int> labels = {0, 2, 1, 1};
  std::vector<double> pooled;
  std::vector<std::uint8_t> ind;
  for (std::size_t u = 0; u < probs.size(); ++u) {
    for (std::size_t c = 0; c < 3; ++c) {
      pooled.push_back(probs[u][c]);
      ind.push_back(static_cast<int>(c) == labels[u]);
    }
  }
  EXPECT_NEAR(MicroAuc(probs, labels), PairCountAuc(pooled, ind), 1e-15);
}

TEST(MicroAuc, PerfectAndConstant) {
  const std::vector<int> labels = {0, 1, 2};
  EXPECT_EQ(MicroAuc({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, labels), 1.0);
  EXPECT_EQ(MicroAuc({{.3, .3, .4}, {.3, .3, .4}, {.3, .3, .4}}, labels), 0.5);
}

TEST(MicroAuc, SingleClassTestSetRejected) {
  EXPECT_THROW(MicroAuc({{.6, .4}, {.2, .8}}, std::vector<int>{1, 1}), ValidationError);
}

TEST(MicroAuc, RandomScorerNearHalf) {
  Rng rng(2);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<std::vector<double>> probs(600, std::vector<double>(21));
  std::vector<int> labels(600);
  for (std::size_t u = 0; u < 600; ++u) {
    double total = 0;
    for (double& v : probs[u]) total += (v = unit(rng));
    for (double& v : probs[u]) v /= total;
    labels[u] = std::uniform_int_distribution<int>(0, 20)(rng);
  }
  const double auc = MicroAuc(probs, labels);
  EXPECT_GE(auc, 0.47);
  EXPECT_LE(auc, 0.53);
}

TEST(MicroAuc, InvariantToMonotoneTransform) {
  Rng rng(3);
  std::uniform_real_distribution<double> unit(0.01, 1);
  std::vector<std::vector<double>> probs(40, std::vector<double>(3));
  std::vector<int> labels(40);
  for (std::size_t u = 0; u < 40; ++u) {
    for (double& v : probs[u]) v = unit(rng);
    labels[u] = static_cast<int>(u % 3);
  }
  auto transformed = probs;
  for (auto& row : transformed) {
    for (double& v : row) v = std::exp(3 * v) - 7;
  }
  EXPECT_NEAR(MicroAuc(probs, labels), MicroAuc(transformed, labels), 1e-15);
}

TEST(TrainAdversary, SeparableToyReachesNinetyNinePercent) {
  const Toy toy = SeparableToy(200, 60, 4);
  AdversaryOptions opts;
  opts.seed = 5;
  const MlpAdversary adv =
      TrainAdversary(toy.lists, toy.users, toy.labels, data::Attribute::kGender, 60, opts);
  const auto probs = adv.Predict(toy.lists);
  std::size_t correct = 0;
  for (std::size_t u = 0; u < toy.users.size(); ++u) {
    const int pred = probs[u][1] > probs[u][0] ? 1 : 0;
    correct += pred == toy.labels.Label(toy.users[u], data::Attribute::kGender);
  }
  EXPECT_GE(static_cast<double>(correct) / 200.0, 0.99);
}

TEST(TrainAdversary, ConstantLabelsSaturate) {
  Toy toy = SeparableToy(64, 30, 6);
  toy.labels = AttributeTable(std::vector<std::array<int, 3>>(64, {0, 2, 0}));
  AdversaryOptions opts;
  const MlpAdversary adv =
      TrainAdversary(toy.lists, toy.users, toy.labels, data::Attribute::kAge, 30, opts);
  for (const auto& p : adv.Predict(toy.lists)) EXPECT_GT(p[2], 0.95);
}

TEST(TrainAdversary, DeterministicUnderSeed) {
  const Toy toy = SeparableToy(50, 30, 7);
  AdversaryOptions opts;
  opts.epochs = 5;
  opts.seed = 8;
  const auto a = TrainAdversary(toy.lists, toy.users, toy.labels, data::Attribute::kGender, 30, opts);
  const auto b = TrainAdversary(toy.lists, toy.users, toy.labels, data::Attribute::kGender, 30, opts);
  EXPECT_TRUE(nn::BitwiseEqual(a.params(), b.params()));
  opts.seed = 9;
  const auto c = TrainAdversary(toy.lists, toy.users, toy.labels, data::Attribute::kGender, 30, opts);
  EXPECT_FALSE(nn::BitwiseEqual(a.params(), c.params()));
}

TEST(TrainAdversary, NeverReadsHiddenLabels) {
  const Toy toy = SeparableToy(20, 30, 10);
  const std::vector<UserId> hidden = {3, 11};
  const AttributeTable visible = toy.labels.WithHidden(hidden);
  AdversaryOptions opts;
  opts.epochs = 1;
  EXPECT_THROW(
      TrainAdversary(toy.lists, toy.users, visible, data::Attribute::kGender, 30, opts),
      LeakageError);
  std::vector<UserId> train_users;
  std::vector<std::vector<ItemId>> train_lists;
  for (std::size_t u = 0; u < toy.users.size(); ++u) {
    if (visible.IsHidden(toy.users[u])) continue;
    train_users.push_back(toy.users[u]);
    train_lists.push_back(toy.lists[u]);
  }
  EXPECT_NO_THROW(
      TrainAdversary(train_lists, train_users, visible, data::Attribute::kGender, 30, opts));
}

TEST(TrainAdversary, EmptyTrainingSetRejected) {
  const AttributeTable labels(std::vector<std::array<int, 3>>(2, {0, 0, 0}));
  EXPECT_THROW(TrainAdversary({}, {}, labels, data::Attribute::kGender, 5, AdversaryOptions{}),
               ValidationError);
}

TEST(EvaluateAttack, SeparableHeldOutUsersAndJson) {
  const Toy train = SeparableToy(150, 40, 11);
  const Toy test = SeparableToy(60, 40, 12);
  const MlpAdversary adv =
      TrainAdversary(train.lists, train.users, train.labels, data::Attribute::kGender, 40, {});
  std::vector<int> truth;
  for (UserId u : test.users) truth.push_back(test.labels.Label(u, data::Attribute::kGender));
  const AttackResult r = EvaluateAttack(adv, test.lists, truth, data::Attribute::kGender, 13);
  EXPECT_GT(r.auc, 0.95);
  EXPECT_EQ(r.num_test, 60u);
  EXPECT_EQ(r.num_classes, 2);
  EXPECT_EQ(r.seed, 13u);
  const auto j = nlohmann::json::parse(AttackResultsJson(std::vector<AttackResult>{r}));
  ASSERT_TRUE(j.contains("gender"));
  EXPECT_DOUBLE_EQ(j["gender"]["auc"].get<double>(), r.auc);
  EXPECT_EQ(j["gender"]["scores"][0], 60);
  EXPECT_EQ(j["gender"]["scores"][1], 2);
}

}  // namespace
}  // namespace rap::eval
