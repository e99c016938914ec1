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

// Acceptance checks. Prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rap/data/movielens.h"
#include "rap/data/splits.h"
#include "rap/errors.h"
#include "rap/eval/metrics.h"
#include "rap/experiment/config.h"
#include "rap/experiment/experiment.h"
#include "rap/experiment/report.h"
#include "rap/model/attacker.h"
#include "rap/model/recommender.h"
#include "rap/nn/ops.h"
#include "rap/nn/parameter_set.h"
#include "rap/nn/tape.h"
#include "rap/rng.h"
#include "rap/train/adversarial_trainer.h"

namespace rap::acceptance {
namespace {

using data::Attribute;
using data::ItemId;
using data::UserId;
using experiment::CellResult;
using experiment::CellSpec;
using nn::ParameterSet;
using nn::Tape;
using nn::Tensor;
using nn::Var;

constexpr std::array<const char*, 3> kAttrShort = {"gen", "age", "occ"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string Fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

using LossBuilder = std::function<Var(Tape&, ParameterSet&)>;

// Central differences over every coordinate against the tape's gradient.
double MaxRelativeError(ParameterSet& params, const LossBuilder& build) {
  params.ZeroGrad();
  {
    Tape tape;
    tape.Backward(build(tape, params));
  }
  const double step = 1e-5;
  double worst = 0.0;
  for (auto& [name, p] : params) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + step;
      double up, down;
      {
        Tape t;
        up = build(t, params).value().item();
      }
      p[i] = saved - step;
      {
        Tape t;
        down = build(t, params).value().item();
      }
      p[i] = saved;
      const double numeric = (up - down) / (2 * step);
      const double analytic = p.has_grad() ? p.grad()[i] : 0.0;
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

Tensor RandomTensor(nn::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

// Keeps ReLU inputs at least 1e-3 away from the kink.
Tensor AwayFromKink(Tensor t) {
  for (double& v : t.values()) {
    if (std::abs(v) < 1e-2) v = v < 0 ? -1e-2 : 1e-2;
  }
  return t;
}

Var Project(Tape& tape, Var out, Rng& rng) {
  return nn::Sum(nn::Mul(out, tape.Constant(RandomTensor(out.shape(), rng))));
}

Outcome KernelGradients() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_case;
  auto check = [&](const std::string& name, ParameterSet& ps, const LossBuilder& build) {
    const double err = MaxRelativeError(ps, build);
    if (err > worst || std::isnan(err)) {
      worst = std::isnan(err) ? INFINITY : err;
      worst_case = name;
    }
  };

  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    Rng rng = MakeRng(1000 + trial);
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    const std::size_t r = dim(rng), c = 1 + dim(rng);
    const std::uint64_t proj_seed = rng();
    auto elementwise = [&](const std::string& name, std::function<Var(Var, Var)> op,
                           bool kinked) {
      ParameterSet ps;
      Tensor a = RandomTensor({r, c}, rng), b = RandomTensor({r, c}, rng);
      if (kinked) {
        a = AwayFromKink(std::move(a));
      }
      ps.Add("a", a);
      ps.Add("b", b);
      check(name, ps, [&](Tape& t, ParameterSet& p) {
        Rng proj(proj_seed);
        return Project(t, op(t.Parameter(p.Get("a")), t.Parameter(p.Get("b"))), proj);
      });
    };
    elementwise("add", [](Var a, Var b) { return nn::Add(a, b); }, false);
    elementwise("sub", [](Var a, Var b) { return nn::Sub(a, b); }, false);
    elementwise("mul", [](Var a, Var b) { return nn::Mul(a, b); }, false);
    elementwise("scale", [](Var a, Var) { return nn::Scale(a, 1.7); }, false);
    elementwise("relu", [](Var a, Var) { return nn::Relu(a); }, true);
    elementwise("tanh", [](Var a, Var b) { return nn::Tanh(nn::Mul(a, b)); }, false);
    elementwise("sigmoid", [](Var a, Var b) { return nn::Sigmoid(nn::Add(a, b)); }, false);
    elementwise("log_sigmoid", [](Var a, Var b) { return nn::LogSigmoid(nn::Sub(a, b)); }, false);
    elementwise("concat", [](Var a, Var b) { return nn::Concat(a, nn::Tanh(b)); }, false);
    elementwise("softmax", [](Var a, Var) { return nn::Softmax(a); }, false);
    elementwise("sum", [](Var a, Var) { return nn::Scale(nn::Sum(nn::Tanh(a)), 1.0); }, false);
    elementwise("mean", [](Var a, Var b) { return nn::Mean(nn::Mul(a, b)); }, false);
    elementwise("squared_norm", [](Var a, Var) { return nn::SquaredNorm(a); }, false);

    {
      ParameterSet ps;
      ps.Add("x", RandomTensor({r, c}, rng));
      ps.Add("w", RandomTensor({2, c}, rng));
      ps.Add("b", RandomTensor({2}, rng));
      ps.Add("m", RandomTensor({2, 3}, rng));
      check("affine+matmul", ps, [&](Tape& t, ParameterSet& p) {
        Rng proj(proj_seed);
        Var y = nn::Affine(t.Parameter(p.Get("x")), t.Parameter(p.Get("w")), t.Parameter(p.Get("b")));
        return Project(t, nn::MatMul(y, t.Parameter(p.Get("m"))), proj);
      });
    }
    {
      ParameterSet ps;
      ps.Add("z", RandomTensor({r, c}, rng, -2, 2));
      std::vector<int> labels(r);
      for (int& y : labels) y = static_cast<int>(rng() % c);
      check("cross_entropy", ps, [&](Tape& t, ParameterSet& p) {
        return nn::Mean(nn::CrossEntropy(nn::Softmax(t.Parameter(p.Get("z"))), labels));
      });
    }
    {
      ParameterSet ps;
      ps.Add("table", RandomTensor({5, 3}, rng));
      std::vector<std::int32_t> rows(4);
      for (auto& x : rows) x = static_cast<std::int32_t>(rng() % 5);
      check("gather_rows", ps, [&](Tape& t, ParameterSet& p) {
        Rng proj(proj_seed);
        return Project(t, nn::Tanh(nn::GatherRows(t.Parameter(p.Get("table")), rows)), proj);
      });
    }
    {
      ParameterSet ps;
      ps.Add("x", RandomTensor({r, 4}, rng));
      ps.Add("h", RandomTensor({r, 3}, rng));
      ps.Add("w_in", RandomTensor({3, 4}, rng));
      ps.Add("w_hh", RandomTensor({3, 3}, rng));
      ps.Add("b", RandomTensor({3}, rng));
      check("rnn_step", ps, [&](Tape& t, ParameterSet& p) {
        Rng proj(proj_seed);
        Var h = nn::RnnStep(t.Parameter(p.Get("x")), t.Parameter(p.Get("h")),
                            t.Parameter(p.Get("w_in")), t.Parameter(p.Get("w_hh")),
                            t.Parameter(p.Get("b")));
        return Project(t, h, proj);
      });
    }
    {
      ParameterSet ps;
      ps.Add("table", RandomTensor({5, 4}, rng));
      ps.Add("w_in", RandomTensor({3, 4}, rng));
      ps.Add("w_hh", RandomTensor({3, 3}, rng));
      ps.Add("b", RandomTensor({3}, rng));
      std::vector<std::vector<std::int32_t>> seqs(3);
      for (auto& s : seqs) {
        s.resize(rng() % 5);
        for (auto& x : s) x = static_cast<std::int32_t>(rng() % 5);
      }
      check("rnn_unroll", ps, [&](Tape& t, ParameterSet& p) {
        Rng proj(proj_seed);
        Var h = nn::RnnFinalStates(t.Parameter(p.Get("table")), seqs, t.Parameter(p.Get("w_in")),
                                   t.Parameter(p.Get("w_hh")), t.Parameter(p.Get("b")));
        return Project(t, h, proj);
      });
    }

    // Full losses on a 3-user, 5-item toy with d = 4, H = 3.
    train::TrainConfig cfg;
    cfg.embed_dim = 4;
    cfg.rec_hidden = 3;
    cfg.att_hidden = 3;
    cfg.seed = 2000 + trial;
    cfg.alpha = 0.5 + static_cast<double>(trial) / 10.0;
    train::TrainState state(cfg, 3, 5);
    std::vector<model::Triplet> triplets;
    for (UserId u = 0; u < 3; ++u) {
      const auto j = static_cast<ItemId>(rng() % 5);
      const auto k = static_cast<ItemId>((j + 1 + rng() % 4) % 5);
      triplets.push_back({u, j, k, (rng() % 2) ? 1 : -1});
    }
    std::vector<std::array<int, 3>> rows;
    for (int u = 0; u < 3; ++u) {
      rows.push_back({static_cast<int>(rng() % 2), static_cast<int>(rng() % 3),
                      static_cast<int>(rng() % 21)});
    }
    const data::AttributeTable labels(rows);
    model::AttackerBatch batch{{0, 1, 2}, {{0, 3, 1}, {4}, {2, 2, 0, 1}}};

    auto fd = [&](const std::string& name, ParameterSet& ps, const std::function<Var(Tape&)>& f) {
      check(name, ps, [&](Tape& t, ParameterSet&) { return f(t); });
    };
    fd("bpr_loss", state.rec.params(), [&](Tape& t) {
      return model::BprLoss(state.rec.Bind(t, true), triplets, 3, cfg.lambda);
    });
    fd("attacker_loss", state.att.params(), [&](Tape& t) {
      return model::AttackerLoss(state.att, t, true, state.rec.Bind(t, false), batch, labels,
                                 cfg.attributes);
    });
    fd("joint_objective", state.rec.params(), [&](Tape& t) {
      return train::JointObjective(state, t, cfg, triplets, 3, batch, labels).objective;
    });
  }
  const double secs = Seconds(start);
  return {worst < 1e-4 && secs < 10.0,
          "max rel err " + Sci(worst) + " at " + worst_case + " (< 1e-4), " + Fmt(secs, 2) +
              " s (< 10 s)"};
}

// ---------------------------------------------------------------- criterion 2

struct Corpus100 {
  data::RatingDataset ratings;
  data::AttributeTable labels;
};

Corpus100 FirstUsers(const experiment::Corpus& corpus, std::size_t n) {
  std::vector<data::Rating> kept;
  for (const data::Rating& r : corpus.ratings.ratings()) {
    if (static_cast<std::size_t>(r.user) < n) kept.push_back(r);
  }
  std::vector<std::array<int, 3>> rows;
  for (std::size_t u = 0; u < n; ++u) {
    std::array<int, 3> row{};
    for (Attribute a : data::kAllAttributes) {
      row[static_cast<std::size_t>(a)] = corpus.attributes.Label(static_cast<UserId>(u), a);
    }
    rows.push_back(row);
  }
  return {data::RatingDataset(n, corpus.ratings.num_items(), std::move(kept)),
          data::AttributeTable(rows)};
}

Outcome DegenerateAlpha(const experiment::Corpus& corpus, const train::TrainConfig& base) {
  const auto start = std::chrono::steady_clock::now();
  const Corpus100 small = FirstUsers(corpus, 100);
  train::TrainConfig cfg = base;
  cfg.alpha = 0.0;
  std::vector<std::uint64_t> joint, alone;
  const train::TrainState a = train::Fit(cfg, small.ratings, small.labels,
                                         [&](const train::TrainState& s) {
                                           joint.push_back(s.rec.params().Checksum());
                                         });
  const train::TrainState b = train::FitRecommenderOnly(
      cfg, small.ratings, [&](const train::TrainState& s) {
        alone.push_back(s.rec.params().Checksum());
      });
  const bool identical = joint == alone && nn::BitwiseEqual(a.rec.params(), b.rec.params());
  const double secs = Seconds(start);
  return {identical && secs < 120.0 && !joint.empty(),
          std::to_string(joint.size()) + " epochs, trajectories " +
              (identical ? "bitwise identical" : "DIFFER") + ", attacker steps " +
              std::to_string(a.att_opt.step_count()) + ", " + Fmt(secs, 1) + " s (< 120 s)"};
}

// ---------------------------------------------------------------- criterion 8

double PairCountAuc(const std::vector<double>& s, const std::vector<std::uint8_t>& pos) {
  double good = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!pos[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (pos[j]) continue;
      pairs += 1;
      good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return good / pairs;
}

Outcome MetricOracles() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng = MakeRng(8);
  std::size_t pk_mismatch = 0;
  double auc_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 4 + rng() % 40;
    std::vector<ItemId> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t n_held = 1 + rng() % (m - 1);
    std::set<ItemId> held(pool.begin(), pool.begin() + static_cast<long>(n_held));
    const std::vector<ItemId> heldout(held.begin(), held.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t k = 1 + rng() % m;
    const std::vector<ItemId> top(pool.begin(), pool.begin() + static_cast<long>(k));
    std::size_t hits = 0;
    for (ItemId j : top) hits += held.count(j);
    pk_mismatch += eval::PrecisionAtK(heldout, top, k) != static_cast<double>(hits) / k;
    pk_mismatch += eval::RecallAtK(heldout, top, k) != static_cast<double>(hits) / n_held;

    const std::size_t users = 2 + rng() % 12, classes = 2 + rng() % 4;
    std::vector<std::vector<double>> probs(users, std::vector<double>(classes));
    std::vector<int> labels(users);
    const bool coarse = trial % 2 == 0;  // coarse scores exercise ties
    for (std::size_t u = 0; u < users; ++u) {
      for (double& v : probs[u]) {
        v = coarse ? static_cast<double>(rng() % 4) / 4.0
                   : std::uniform_real_distribution<double>(0, 1)(rng);
      }
      labels[u] = static_cast<int>(u < 2 ? u : rng() % classes);
    }
    std::vector<double> pooled;
    std::vector<std::uint8_t> ind;
    for (std::size_t u = 0; u < users; ++u) {
      for (std::size_t c = 0; c < classes; ++c) {
        pooled.push_back(probs[u][c]);
        ind.push_back(static_cast<int>(c) == labels[u]);
      }
    }
    auc_err = std::max(auc_err, std::abs(eval::MicroAuc(probs, labels) - PairCountAuc(pooled, ind)));
  }
  const double secs = Seconds(start);
  return {pk_mismatch == 0 && auc_err <= 1e-9 && secs < 5.0,
          "1000 cases, P@K/R@K mismatches " + std::to_string(pk_mismatch) + " (exact), AUC max err " +
              Sci(auc_err) + " (<= 1e-9), " + Fmt(secs, 2) + " s (< 5 s)"};
}

// ---------------------------------------------------------------- criterion 9

Outcome AdversarialCoupling(const experiment::Corpus& corpus, const train::TrainConfig& base,
                            double train_fraction) {
  const auto start = std::chrono::steady_clock::now();
  const data::AttackSplit split =
      data::SplitAttacker(corpus.ratings, train_fraction, 35, base.seed);
  const data::AttributeTable visible = corpus.attributes.WithHidden(split.test_users);
  train::TrainState state(base, corpus.ratings.num_users(), corpus.ratings.num_items());
  Rng rng = MakeRng(base.seed, {99});
  std::size_t decreased = 0;
  double min_gain = INFINITY;
  for (int b = 0; b < 100; ++b) {
    std::vector<UserId> users;
    std::sample(split.train_users.begin(), split.train_users.end(), std::back_inserter(users),
                base.batch_size, rng);
    const model::AttackerBatch batch = train::MakeAttackerBatch(
        train::BuildItemLists(state.rec, split.observed, users, base.train_k), base.max_sequence);
    auto loss = [&] {
      Tape t;
      return model::AttackerLoss(state.att, t, false, state.rec.Bind(t, false), batch, visible,
                                 base.attributes)
          .value()
          .item();
    };
    const double before = loss();
    state.rec.params().ZeroGrad();
    {
      Tape t;
      Var l = model::AttackerLoss(state.att, t, false, state.rec.Bind(t, true), batch, visible,
                                  base.attributes);
      t.Backward(nn::Scale(l, -base.alpha));
    }
    ParameterSet saved;
    for (auto& [name, p] : state.rec.params()) {
      saved.Add(name, Tensor(p.shape(), std::vector<double>(p.values().begin(), p.values().end())));
      if (!p.has_grad()) continue;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= 1e-6 * p.grad()[i];
    }
    const double after = loss();
    state.rec.params().CopyValuesFrom(saved);
    decreased += after < before;
    min_gain = std::min(min_gain, after - before);
  }
  const double secs = Seconds(start);
  return {decreased == 0 && secs < 30.0,
          "100 batches, L_DP decreased in " + std::to_string(decreased) + ", min change " +
              Sci(min_gain) + ", " + Fmt(secs, 1) + " s (< 30 s)"};
}

// ---------------------------------------------------------- experiment cells

class Cells {
 public:
  Cells(experiment::ExperimentRunner& runner, std::vector<std::uint64_t> seeds)
      : runner_(runner), seeds_(std::move(seeds)) {}

  // Runs (or loads) one cell per seed and returns the seed-mean.
  CellResult Mean(const std::string& method, const std::string& label, int l, double alpha,
                  std::vector<Attribute> attributes, bool utility, bool privacy) {
    std::vector<CellResult> runs;
    for (std::uint64_t seed : seeds_) {
      CellSpec s;
      s.method = method;
      s.label = label;
      s.l = l;
      s.seed = seed;
      s.alpha = alpha;
      s.attributes = std::move(attributes);
      s.utility = utility;
      s.privacy = privacy;
      attributes = s.attributes;
      runs.push_back(runner_.RunCell(s));
      report_.cells.push_back(runs.back());
    }
    experiment::ExperimentReport one;
    one.cells = runs;
    return *one.Mean(runs.front().method, l);
  }

  double UtilitySeconds(const std::string& label, int l) const {
    double total = 0;
    for (const CellResult& c : report_.cells) {
      if (c.method == label && c.l == l && !std::isnan(c.precision)) total += c.seconds;
    }
    return total;
  }

  experiment::ExperimentReport& report() { return report_; }

 private:
  experiment::ExperimentRunner& runner_;
  std::vector<std::uint64_t> seeds_;
  experiment::ExperimentReport report_;
};

const std::vector<Attribute> kAll = {data::kAllAttributes.begin(), data::kAllAttributes.end()};

std::string AucTriple(const CellResult& c) {
  return Fmt(c.auc[0]) + "/" + Fmt(c.auc[1]) + "/" + Fmt(c.auc[2]);
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string data_dir = "data/ml-100k", cache_dir, report_dir;
  std::vector<std::string> overrides;
  std::vector<int> only;
  bool strict = false;
  app.add_option("--data-dir", data_dir, "Directory with u.data and u.user");
  app.add_option("--cache-dir", cache_dir, "Cell cache directory");
  app.add_option("--report-dir", report_dir, "Where to write the acceptance report");
  app.add_option("--set", overrides, "Config override key=value");
  app.add_option("--only", only, "Run only these criteria");
  app.add_flag("--strict", strict, "Exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  experiment::ExperimentConfig cfg;
  cfg.Set("data_dir", data_dir);
  if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value: " + kv);
    cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.Validate();
  auto wanted = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };

  std::vector<std::pair<int, Outcome>> outcomes;
  auto record = [&](int id, const std::string& name, Outcome o) {
    std::cout << "CRITERION " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": "
              << o.detail << std::endl;
    outcomes.emplace_back(id, std::move(o));
  };

  if (wanted(1)) record(1, "kernel gradients", KernelGradients());
  if (wanted(8)) record(8, "metric oracles", MetricOracles());

  const bool needs_data = std::any_of(std::begin({2, 3, 4, 5, 6, 7, 9, 10}),
                                      std::end({2, 3, 4, 5, 6, 7, 9, 10}),
                                      [&](int id) { return wanted(id); });
  if (needs_data) {
    experiment::Corpus corpus = experiment::LoadCorpus(cfg);
    if (wanted(2)) record(2, "alpha=0 degeneracy", DegenerateAlpha(corpus, cfg.train));
    if (wanted(9)) {
      record(9, "adversarial coupling", AdversarialCoupling(corpus, cfg.train, cfg.train_fraction));
    }

    experiment::ExperimentRunner runner(cfg, std::move(corpus));
    runner.set_progress([](const std::string& m) { std::cerr << "[acceptance] " << m << std::endl; });
    Cells cells(runner, cfg.seeds);
    cells.report().name = "acceptance";
    for (const auto& [k, v] : cfg.ToFlat()) cells.report().config[k] = v;
    const double alpha = cfg.train.alpha;
    const std::array<double, 3> paper_rap = {0.604, 0.540, 0.732};
    const std::array<double, 3> paper_orig = {0.766, 0.705, 0.833};

    auto original = [&] { return cells.Mean("original", "Original", 35, 0, kAll, true, true); };
    auto rap = [&] { return cells.Mean("rap", "RAP", 35, alpha, kAll, true, true); };

    if (wanted(3)) {
      const CellResult o = original(), r = rap();
      const double o_min = cells.UtilitySeconds("Original", 35) / 60.0;
      const double r_min = cells.UtilitySeconds("RAP", 35) / 60.0;
      const bool ok = std::abs(o.precision - 0.156) <= 0.03 && std::abs(r.precision - 0.152) <= 0.03 &&
                      o_min <= 45.0 && r_min <= 45.0;
      record(3, "table1 utility",
             {ok, "P@35 Original " + Fmt(o.precision) + " (0.156 +/- 0.03), RAP " +
                      Fmt(r.precision) + " (0.152 +/- 0.03); evaluable-only " +
                      Fmt(o.precision_eval) + " / " + Fmt(r.precision_eval) + "; utility time " +
                      Fmt(o_min, 1) + " / " + Fmt(r_min, 1) + " min (<= 45)"});
    }
    if (wanted(4)) {
      const CellResult o = original(), r = rap();
      bool absolute = true, ordering = true;
      for (std::size_t t = 0; t < 3; ++t) {
        absolute &= std::abs(r.auc[t] - paper_rap[t]) <= 0.06;
        ordering &= o.auc[t] - r.auc[t] >= 0.05 && std::abs(o.auc[t] - paper_orig[t]) <= 0.05;
      }
      record(4, "table1 privacy",
             {absolute || ordering,
              "RAP gen/age/occ " + AucTriple(r) + " (0.604/0.540/0.732 +/- 0.06: " +
                  (absolute ? "met" : "missed") + "); Original " + AucTriple(o) +
                  " (0.766/0.705/0.833 +/- 0.05, gap >= 0.05: " + (ordering ? "met" : "missed") +
                  ")"});
    }
    if (wanted(5)) {
      bool ok = true;
      std::string detail;
      for (const std::string& m : cfg.methods) {
        const std::string label = experiment::MethodLabel(m);
        const double a = m == "rap" ? alpha : 0.0;
        const CellResult at35 = cells.Mean(m, label, 35, a, kAll, true, true);
        const CellResult at45 = cells.Mean(m, label, 45, a, kAll, false, true);
        detail += label + " ";
        for (std::size_t t = 0; t < 3; ++t) {
          const bool good = at45.auc[t] <= at35.auc[t];
          ok &= good;
          detail += std::string(kAttrShort[t]) + " " + Fmt(at35.auc[t]) + "->" + Fmt(at45.auc[t]) +
                    (good ? "" : "!") + (t < 2 ? " " : "; ");
        }
      }
      record(5, "monotone l (35 -> 45)", {ok, detail});
    }
    if (wanted(6)) {
      const CellResult zero = original();
      const CellResult quarter = cells.Mean("rap", "alpha=0.25", 35, 0.25, kAll, false, true);
      const CellResult half = cells.Mean("rap", "alpha=0.5", 35, 0.5, kAll, false, true);
      bool ok = true;
      for (std::size_t t = 0; t < 3; ++t) ok &= quarter.auc[t] < zero.auc[t];
      record(6, "alpha sweep shape",
             {ok, "AUC gen/age/occ alpha=0 " + AucTriple(zero) + ", alpha=0.25 " +
                      AucTriple(quarter) + "; not gated: alpha=0.5 " + AucTriple(half)});
    }
    if (wanted(7)) {
      const CellResult all = rap();
      const CellResult age = cells.Mean("rap", "RAPAge", 35, alpha, {Attribute::kAge}, false, true);
      const CellResult gen = cells.Mean("rap", "RAPGen", 35, alpha, {Attribute::kGender}, false, true);
      const CellResult occ =
          cells.Mean("rap", "RAPOcc", 35, alpha, {Attribute::kOccupation}, false, true);
      const bool gen_lowest = gen.auc[0] < all.auc[0] && gen.auc[0] < age.auc[0] && gen.auc[0] < occ.auc[0];
      const bool age_ok = all.auc[1] < gen.auc[1] && all.auc[1] < occ.auc[1];
      const bool occ_ok = all.auc[2] < gen.auc[2] && all.auc[2] < age.auc[2];
      record(7, "variants",
             {gen_lowest && age_ok && occ_ok,
              "gen/age/occ RAP " + AucTriple(all) + ", RAPAge " + AucTriple(age) + ", RAPGen " +
                  AucTriple(gen) + ", RAPOcc " + AucTriple(occ) + "; RAPGen lowest gender " +
                  (gen_lowest ? "yes" : "no") + ", RAP age " + (age_ok ? "yes" : "no") +
                  ", RAP occ " + (occ_ok ? "yes" : "no")});
    }
    if (wanted(10)) {
      const CellResult o = original(), r = rap();
      const CellResult b = cells.Mean("blurme", "BlurMe", 35, 0, kAll, true, true);
      const CellResult l = cells.Mean("ldp", "LDP", 35, 0, kAll, true, true);
      bool auc_ok = true;
      for (std::size_t t = 0; t < 2; ++t) auc_ok &= r.auc[t] <= b.auc[t] && b.auc[t] <= o.auc[t];
      const bool pk_ok = l.precision < b.precision && b.precision < r.precision;
      record(10, "baseline ordering",
             {auc_ok && pk_ok,
              "gen/age AUC RAP " + Fmt(r.auc[0]) + "/" + Fmt(r.auc[1]) + " <= BlurMe " +
                  Fmt(b.auc[0]) + "/" + Fmt(b.auc[1]) + " <= Original " + Fmt(o.auc[0]) + "/" +
                  Fmt(o.auc[1]) + " (" + (auc_ok ? "holds" : "violated") + "); P@35 LDP " +
                  Fmt(l.precision) + " < BlurMe " + Fmt(b.precision) + " < RAP " +
                  Fmt(r.precision) + " (" + (pk_ok ? "holds" : "violated") + "); k_add 10%, eps " +
                  Fmt(cfg.ldp_epsilon, 1)});
    }

    if (!report_dir.empty()) {
      std::filesystem::create_directories(report_dir);
      std::ofstream(std::filesystem::path(report_dir) / "acceptance.json")
          << experiment::ReportToJson(cells.report());
      std::ofstream(std::filesystem::path(report_dir) / "acceptance.csv")
          << experiment::ReportToCsv(cells.report(), false);
    }
  }

  std::sort(outcomes.begin(), outcomes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t passed = 0;
  std::ostringstream summary;
  for (const auto& [id, o] : outcomes) {
    passed += o.pass;
    summary << "CRITERION " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "\n";
  }
  summary << passed << "/" << outcomes.size() << " criteria passed\n";
  std::cout << "---\n" << summary.str();
  if (!report_dir.empty()) {
    std::filesystem::create_directories(report_dir);
    std::ofstream(std::filesystem::path(report_dir) / "acceptance.txt") << summary.str();
  }
  return strict && passed != outcomes.size() ? 1 : 0;
}

}  // namespace rap::acceptance

int main(int argc, char** argv) {
  try {
    return rap::acceptance::Main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << std::endl;
    return 1;
  }
}
