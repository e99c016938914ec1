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
#include <filesystem>
#include <numeric>
#include <set>

#include <unistd.h>

#include "gtest/gtest.h"
#include "rap/errors.h"
#include "rap/eval/metrics.h"
#include "rap/experiment/config.h"
#include "rap/experiment/experiment.h"
#include "rap/experiment/report.h"
#include "rap/rng.h"

namespace rap::experiment {
namespace {

using data::ItemId;

double OverlapCount(const std::vector<ItemId>& heldout, const std::vector<ItemId>& top,
                    std::size_t k) {
  double hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (ItemId h : heldout) hits += top[i] == h;
  }
  return hits;
}

TEST(PrecisionAtK, Examples) {
  const std::vector<ItemId> top = {1, 2, 4, 5};
  EXPECT_EQ(eval::PrecisionAtK(std::vector<ItemId>{1, 2, 3}, top, 4), 0.5);
  EXPECT_EQ(eval::PrecisionAtK(std::vector<ItemId>{1, 2, 4, 5, 9}, top, 4), 1.0);
  EXPECT_EQ(eval::PrecisionAtK(std::vector<ItemId>{7, 8}, top, 4), 0.0);
  EXPECT_THROW(eval::PrecisionAtK(std::vector<ItemId>{1}, top, 0), ValidationError);
  EXPECT_THROW(eval::PrecisionAtK(std::vector<ItemId>{1}, top, 5), ValidationError);
}

TEST(RecallAtK, Examples) {
  EXPECT_EQ(eval::RecallAtK(std::vector<ItemId>{1, 2, 3, 4}, std::vector<ItemId>{1, 9}, 2), 0.25);
  EXPECT_EQ(eval::RecallAtK(std::vector<ItemId>{3, 1}, std::vector<ItemId>{1, 2, 3}, 3), 1.0);
  EXPECT_THROW(eval::RecallAtK(std::vector<ItemId>{}, std::vector<ItemId>{1}, 1), ValidationError);
}

TEST(RecallAtK, EqualsPrecisionWhenKIsHeldoutSize) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ItemId> pool(40);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<ItemId> heldout(pool.begin(), pool.begin() + 8);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<ItemId> top(pool.begin(), pool.begin() + 8);
    EXPECT_EQ(eval::PrecisionAtK(heldout, top, 8), eval::RecallAtK(heldout, top, 8));
  }
}

TEST(Metrics, MatchBruteForceOnRandomCases) {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 5 + static_cast<std::size_t>(trial % 30);
    std::vector<ItemId> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t n_held = 1 + rng() % (m - 1);
    const std::vector<ItemId> heldout(pool.begin(), pool.begin() + static_cast<long>(n_held));
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t k = 1 + rng() % m;
    const std::vector<ItemId> top(pool.begin(), pool.begin() + static_cast<long>(k));
    const double hits = OverlapCount(heldout, top, k);
    EXPECT_EQ(eval::PrecisionAtK(heldout, top, k), hits / static_cast<double>(k));
    EXPECT_EQ(eval::RecallAtK(heldout, top, k), hits / static_cast<double>(n_held));
  }
}

TEST(FlatConfig, ParsesCommentsAndReportsLine) {
  const FlatConfig f = ParseFlatConfig("# header\nseeds = 1,2\n\n  epochs=3  # inline\n");
  EXPECT_EQ(f.at("seeds"), "1,2");
  EXPECT_EQ(f.at("epochs"), "3");
  try {
    ParseFlatConfig("a = 1\nbroken line\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_EQ(ParseFlatConfig(FormatFlatConfig(f)), f);
}

TEST(ExperimentConfig, SetApplyAndRoundTrip) {
  ExperimentConfig cfg;
  cfg.Set("data_dir", "/tmp/ml");
  EXPECT_EQ(cfg.ratings_path, std::filesystem::path("/tmp/ml/u.data"));
  EXPECT_EQ(cfg.users_path, std::filesystem::path("/tmp/ml/u.user"));
  cfg.Apply(ParseFlatConfig("l_values = 35\nalpha = 0.5\nattributes = age\nepochs = 4\n"));
  EXPECT_EQ(cfg.l_values, std::vector<int>{35});
  EXPECT_EQ(cfg.train.alpha, 0.5);
  EXPECT_EQ(cfg.train.epochs, 4);
  EXPECT_EQ(cfg.train.attributes, std::vector<data::Attribute>{data::Attribute::kAge});
  ExperimentConfig back;
  back.Apply(cfg.ToFlat());
  EXPECT_EQ(back.ToFlat(), cfg.ToFlat());
  EXPECT_THROW(cfg.Set("no_such_key", "1"), ValidationError);
  EXPECT_THROW(cfg.Set("epochs", "many"), ValidationError);
  ExperimentConfig bad;
  bad.methods = {"rap", "svd"};
  EXPECT_THROW(bad.Validate(), ValidationError);
}

TEST(ExperimentConfig, AttributeListRoundTrip) {
  const auto attrs = ParseAttributeList("gender,occupation");
  EXPECT_EQ(attrs, (std::vector<data::Attribute>{data::Attribute::kGender,
                                                 data::Attribute::kOccupation}));
  EXPECT_EQ(ParseAttributeList(FormatAttributeList(attrs)), attrs);
  EXPECT_THROW(ParseAttributeList("gender,zip"), ValidationError);
}

CellResult SampleCell(const std::string& method, int l, std::uint64_t seed, double base) {
  CellResult c;
  c.method = method;
  c.l = l;
  c.seed = seed;
  c.alpha = 0.25;
  c.auc = {base, base + 0.01, kMissing};
  c.precision = base / 4;
  c.recall = base / 5;
  c.precision_eval = base / 3;
  c.recall_eval = base / 2;
  c.evaluable_users = 689;
  c.excluded_users = 254;
  c.short_profile_users = 52;
  c.seconds = 1.0 / 3.0;
  return c;
}

bool SameCell(const CellResult& a, const CellResult& b) {
  auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  for (std::size_t i = 0; i < 3; ++i) {
    if (!same(a.auc[i], b.auc[i])) return false;
  }
  return a.method == b.method && a.l == b.l && a.seed == b.seed && same(a.alpha, b.alpha) &&
         same(a.precision, b.precision) && same(a.recall, b.recall) &&
         same(a.precision_eval, b.precision_eval) && same(a.recall_eval, b.recall_eval) &&
         a.evaluable_users == b.evaluable_users && a.excluded_users == b.excluded_users &&
         a.short_profile_users == b.short_profile_users && same(a.seconds, b.seconds);
}

ExperimentReport SampleReport() {
  ExperimentReport r;
  r.name = "table1";
  r.config = {{"seeds", "1,2"}, {"top_k", "35"}};
  r.seconds = 12.5;
  r.cells = {SampleCell("Original", 35, 1, 0.7), SampleCell("Original", 35, 2, 0.8),
             SampleCell("RAP", 35, 1, 0.6123456789012345)};
  return r;
}

TEST(Report, JsonRoundTripIsLossless) {
  const ExperimentReport r = SampleReport();
  const ExperimentReport back = ReportFromJson(ReportToJson(r));
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.seconds, r.seconds);
  ASSERT_EQ(back.cells.size(), r.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) EXPECT_TRUE(SameCell(back.cells[i], r.cells[i])) << i;
  EXPECT_TRUE(SameCell(CellFromJson(CellToJson(r.cells[2])), r.cells[2]));
  EXPECT_THROW(ReportFromJson("[1,2"), ValidationError);
}

TEST(Report, CsvRoundTripIsLossless) {
  const ExperimentReport r = SampleReport();
  const std::string csv = ReportToCsv(r, false);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,l,seed,alpha,gen,age,occ,p_at_k,r_at_k,p_at_k_eval,r_at_k_eval,"
            "evaluable_users,excluded_users,short_profile_users,seconds");
  const ExperimentReport back = ReportFromCsv(csv);
  ASSERT_EQ(back.cells.size(), r.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) EXPECT_TRUE(SameCell(back.cells[i], r.cells[i])) << i;
}

TEST(Report, MeanOverSeeds) {
  const ExperimentReport r = SampleReport();
  const auto mean = r.Mean("Original", 35);
  ASSERT_TRUE(mean.has_value());
  EXPECT_NEAR(mean->auc[0], 0.75, 1e-15);
  EXPECT_NEAR(mean->precision, 0.75 / 4, 1e-15);
  EXPECT_TRUE(std::isnan(mean->auc[2]));
  EXPECT_FALSE(r.Mean("LDP", 35).has_value());
  EXPECT_EQ(r.Cells("Original", 35).size(), 2u);
  EXPECT_EQ(r.MeanOverSeeds().size(), 2u);
  EXPECT_NE(FormatTable(r).find("Original"), std::string::npos);
}

// Synthetic corpus: 60 users, 80 items, 20 to 39 ratings each.
Corpus SyntheticCorpus() {
  Rng rng(3);
  std::vector<data::Rating> ratings;
  std::vector<std::array<int, 3>> rows;
  std::int64_t ts = 0;
  for (UserId u = 0; u < 60; ++u) {
    rows.push_back({u % 2, (u / 2) % 3, (u * 7) % 21});
    std::vector<ItemId> items(80);
    std::iota(items.begin(), items.end(), 0);
    std::shuffle(items.begin(), items.end(), rng);
    const int n = 20 + u % 20;
    for (int i = 0; i < n; ++i) {
      ratings.push_back({u, items[static_cast<std::size_t>(i)], 1 + i % 5, ts++});
    }
  }
  return Corpus{data::RatingDataset(60, 80, std::move(ratings)), data::AttributeTable(rows)};
}

ExperimentConfig TinyExperiment(const std::filesystem::path& cache) {
  ExperimentConfig cfg;
  cfg.seeds = {1};
  cfg.l_values = {5, 8};
  cfg.methods = {"original", "rap"};
  cfg.alpha_values = {0.5, 1.0};
  cfg.top_k = 5;
  cfg.train.epochs = 1;
  cfg.train.train_k = 5;
  cfg.train.embed_dim = 6;
  cfg.train.rec_hidden = 4;
  cfg.train.att_hidden = 6;
  cfg.train.batch_size = 16;
  cfg.adversary.epochs = 2;
  cfg.adversary.hidden = 8;
  cfg.cache_dir = cache;
  return cfg;
}

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cache_ = std::filesystem::temp_directory_path() /
             ("rap_harness_cache_" + std::to_string(::getpid()));
    std::filesystem::remove_all(cache_);
  }
  void TearDown() override { std::filesystem::remove_all(cache_); }
  std::filesystem::path cache_;
};

TEST_F(RunnerTest, UtilityIsMeanOfPerUserMetrics) {
  const Corpus corpus = SyntheticCorpus();
  const data::RecSplit split = data::SplitRecommendation(corpus.ratings, 25, 4);
  Rng rng(5);
  const model::Recommender rec(model::RecommenderShape{60, 80, 6, 4}, rng);
  const auto u = ExperimentRunner::EvaluateUtility(rec, split.train, split, 5);

  double p = 0, r = 0;
  std::size_t evaluable = 0;
  for (UserId h = 0; h < 60; ++h) {
    if (!split.IsEvaluable(h)) continue;
    std::vector<std::pair<double, ItemId>> scored;
    for (ItemId j = 0; j < 80; ++j) {
      if (!split.train.IsRated(h, j)) scored.emplace_back(-rec.ScoreItem(h, j), j);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<ItemId> top;
    for (std::size_t i = 0; i < 5; ++i) top.push_back(scored[i].second);
    const auto& held = split.heldout[static_cast<std::size_t>(h)];
    const double hits = OverlapCount(held, top, 5);
    p += hits / 5.0;
    r += hits / static_cast<double>(held.size());
    ++evaluable;
  }
  EXPECT_EQ(u.evaluable, evaluable);
  EXPECT_LT(evaluable, 60u);
  EXPECT_NEAR(u.precision_eval, p / static_cast<double>(evaluable), 1e-12);
  EXPECT_NEAR(u.recall_eval, r / static_cast<double>(evaluable), 1e-12);
  EXPECT_NEAR(u.precision, p / 60.0, 1e-12);
  EXPECT_NEAR(u.recall, r / 60.0, 1e-12);
}

TEST_F(RunnerTest, Table1ShapeRangesAndCache) {
  ExperimentRunner runner(TinyExperiment(cache_), SyntheticCorpus());
  const ExperimentReport first = runner.RunTable1();
  ASSERT_EQ(first.cells.size(), 4u);
  std::set<std::string> methods;
  for (const CellResult& c : first.cells) {
    methods.insert(c.method);
    for (double a : c.auc) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
    for (double v : {c.precision, c.recall, c.precision_eval, c.recall_eval}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(c.evaluable_users + c.excluded_users, 60u);
  }
  EXPECT_EQ(methods, (std::set<std::string>{"Original", "RAP"}));
  EXPECT_FALSE(std::filesystem::is_empty(cache_));

  ExperimentRunner again(TinyExperiment(cache_), SyntheticCorpus());
  std::vector<std::string> notes;
  again.set_progress([&](const std::string& m) { notes.push_back(m); });
  const ExperimentReport second = again.RunTable1();
  EXPECT_TRUE(notes.empty());
  for (std::size_t i = 0; i < first.cells.size(); ++i) {
    EXPECT_TRUE(SameCell(first.cells[i], second.cells[i])) << i;
  }
}

TEST_F(RunnerTest, AlphaSweepIncludesOriginalReference) {
  ExperimentRunner runner(TinyExperiment(cache_), SyntheticCorpus());
  const ExperimentReport sweep = runner.RunAlphaSweep();
  ASSERT_EQ(sweep.cells.size(), 3u);
  EXPECT_EQ(sweep.cells[0].method, "alpha=0");
  EXPECT_EQ(sweep.cells[0].alpha, 0.0);
  CellSpec original;
  original.method = "original";
  original.l = 5;
  original.seed = 1;
  const CellResult ref = runner.RunCell(original);
  EXPECT_EQ(sweep.cells[0].auc, ref.auc);
  EXPECT_EQ(sweep.cells[0].precision, ref.precision);
}

TEST_F(RunnerTest, VariantsHaveFourRows) {
  ExperimentConfig cfg = TinyExperiment(cache_);
  cfg.cache_dir.clear();
  ExperimentRunner runner(cfg, SyntheticCorpus());
  const ExperimentReport v = runner.RunVariants();
  std::vector<std::string> labels;
  for (const CellResult& c : v.cells) labels.push_back(c.method);
  EXPECT_EQ(labels, (std::vector<std::string>{"RAP", "RAPAge", "RAPGen", "RAPOcc"}));
  for (const CellResult& c : v.cells) EXPECT_EQ(c.l, 5);
}

TEST(MethodLabel, Names) {
  EXPECT_EQ(MethodLabel("original"), "Original");
  EXPECT_EQ(MethodLabel("rap"), "RAP");
  EXPECT_EQ(MethodLabel("blurme"), "BlurMe");
  EXPECT_EQ(MethodLabel("ldp"), "LDP");
}

TEST(LoadCorpus, CanonicalFiles) {
  const char* env = std::getenv("RAP_MOVIELENS_DIR");
  const std::filesystem::path dir = env ? env : "data/ml-100k";
  if (!std::filesystem::exists(dir / "u.data")) GTEST_SKIP() << "MovieLens-100K not available";
  ExperimentConfig cfg;
  cfg.Set("data_dir", dir.string());
  const Corpus c = LoadCorpus(cfg);
  EXPECT_EQ(c.ratings.num_users(), 943u);
  EXPECT_EQ(c.attributes.num_users(), 943u);
}

}  // namespace
}  // namespace rap::experiment
