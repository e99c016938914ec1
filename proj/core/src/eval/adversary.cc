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

#include "rap/eval/adversary.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rap/errors.h"
#include "rap/eval/metrics.h"
#include "rap/nn/ops.h"
#include "rap/nn/adam.h"
#include "rap/rng.h"

namespace rap::eval {

using nn::Tensor;

namespace {

Tensor Glorot(nn::Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

Tensor MultiHot(const std::vector<std::vector<ItemId>>& lists, std::span<const std::size_t> rows,
                std::size_t num_items) {
  Tensor x({rows.size(), num_items});
  auto v = x.values();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (ItemId j : lists[rows[r]]) {
      if (j < 0 || static_cast<std::size_t>(j) >= num_items) {
        throw ValidationError("item index out of range in adversary input");
      }
      v[r * num_items + static_cast<std::size_t>(j)] = 1.0;
    }
  }
  return x;
}

template <typename Bind>
nn::Var Forward(nn::Tape& tape, Bind bind, Tensor x) {
  nn::Var h = nn::Relu(nn::Affine(tape.Constant(std::move(x)), bind("adv.w1"), bind("adv.b1")));
  return nn::Softmax(nn::Affine(h, bind("adv.w2"), bind("adv.b2")));
}

}  // namespace

std::vector<double> Featurize(std::span<const ItemId> items, std::size_t num_items) {
  std::vector<double> x(num_items, 0.0);
  for (ItemId j : items) {
    if (j < 0 || static_cast<std::size_t>(j) >= num_items) {
      throw ValidationError("item " + std::to_string(j) + " out of range");
    }
    x[static_cast<std::size_t>(j)] = 1.0;
  }
  return x;
}

MlpAdversary::MlpAdversary(std::size_t num_items, std::size_t hidden, int num_classes,
                           std::uint64_t seed)
    : num_items_(num_items), num_classes_(num_classes) {
  if (num_items == 0 || hidden == 0 || num_classes < 2) {
    throw ValidationError("adversary needs items, hidden units and >= 2 classes");
  }
  const auto c = static_cast<std::size_t>(num_classes);
  Rng rng = MakeRng(seed, {kStreamAdversary});
  params_.Add("adv.w1", Glorot({hidden, num_items}, num_items, hidden, rng));
  params_.Add("adv.b1", Tensor({hidden}));
  params_.Add("adv.w2", Glorot({c, hidden}, hidden, c, rng));
  params_.Add("adv.b2", Tensor({c}));
}

std::vector<std::vector<double>> MlpAdversary::Predict(
    const std::vector<std::vector<ItemId>>& lists) const {
  std::vector<std::vector<double>> out;
  out.reserve(lists.size());
  constexpr std::size_t kChunk = 256;
  auto bind = [this](nn::Tape& tape) {
    return [this, &tape](const char* name) { return tape.ConstantRef(params_.Get(name)); };
  };
  for (std::size_t lo = 0; lo < lists.size(); lo += kChunk) {
    const std::size_t hi = std::min(lists.size(), lo + kChunk);
    std::vector<std::size_t> rows(hi - lo);
    std::iota(rows.begin(), rows.end(), lo);
    nn::Tape tape;
    nn::Var probs = Forward(tape, bind(tape), MultiHot(lists, rows, num_items_));
    const auto v = probs.value().values();
    const auto c = static_cast<std::size_t>(num_classes_);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.emplace_back(v.begin() + static_cast<long>(r * c),
                       v.begin() + static_cast<long>((r + 1) * c));
    }
  }
  return out;
}

MlpAdversary TrainAdversary(const std::vector<std::vector<ItemId>>& lists,
                            std::span<const UserId> users, const data::AttributeTable& labels,
                            Attribute attribute, std::size_t num_items,
                            const AdversaryOptions& options) {
  if (users.empty()) throw ValidationError("adversary training set is empty");
  if (lists.size() != users.size()) throw ValidationError("adversary: lists and users differ");
  if (options.epochs < 0 || options.batch_size == 0 || !(options.learning_rate > 0.0)) {
    throw ValidationError("invalid adversary options");
  }
  std::vector<int> y;
  y.reserve(users.size());
  for (UserId u : users) y.push_back(labels.Label(u, attribute));

  MlpAdversary model(num_items, options.hidden, data::NumClasses(attribute), options.seed);
  nn::Adam opt(nn::AdamOptions{options.learning_rate});
  std::vector<std::size_t> order(users.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 0; e < options.epochs; ++e) {
    Rng rng = MakeRng(options.seed, {kStreamAdversary, static_cast<std::uint64_t>(e) + 1});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t lo = 0; lo < order.size(); lo += options.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + options.batch_size);
      std::span<const std::size_t> rows(order.data() + lo, hi - lo);
      std::vector<int> batch_y;
      for (std::size_t r : rows) batch_y.push_back(y[r]);
      nn::Tape tape;
      auto bind = [&](const char* name) { return tape.Parameter(model.params().Get(name)); };
      nn::Var probs = Forward(tape, bind, MultiHot(lists, rows, num_items));
      nn::Var loss = nn::Mean(nn::CrossEntropy(probs, batch_y));
      if (!std::isfinite(loss.value().item())) throw NumericalError("adversary loss diverged");
      model.params().ZeroGrad();
      tape.Backward(loss);
      opt.Step(model.params());
    }
  }
  return model;
}

AttackResult EvaluateAttack(const MlpAdversary& adversary,
                            const std::vector<std::vector<ItemId>>& test_lists,
                            std::span<const int> true_labels, Attribute attribute,
                            std::uint64_t seed) {
  if (adversary.num_classes() != data::NumClasses(attribute)) {
    throw ValidationError("adversary was trained for a different attribute");
  }
  AttackResult r;
  r.attribute = attribute;
  r.auc = MicroAuc(adversary.Predict(test_lists), true_labels);
  r.num_test = test_lists.size();
  r.num_classes = adversary.num_classes();
  r.seed = seed;
  return r;
}

std::string AttackResultsJson(std::span<const AttackResult> results) {
  nlohmann::json j = nlohmann::json::object();
  for (const AttackResult& r : results) {
    j[std::string(data::AttributeName(r.attribute))] = {
        {"auc", r.auc},
        {"scores", {r.num_test, r.num_classes}},
        {"seed", r.seed}};
  }
  return j.dump(2);
}

}  // namespace rap::eval
