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

#include "rap/model/attacker.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rap/errors.h"
#include "rap/nn/ops.h"

namespace rap::model {

using nn::Shape;
using nn::Tensor;
using nn::Var;

namespace {

Tensor InitTensor(Shape shape, std::size_t fan_in, AttackerInit init, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(
      init == AttackerInit::kUnitUniform ? 0.0 : -bound,
      init == AttackerInit::kUnitUniform ? 1.0 : bound);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace

std::vector<ItemId> ItemListSequence::Tail(std::size_t max_length) const {
  if (max_length == 0 || items.size() <= max_length) return items;
  return std::vector<ItemId>(items.end() - static_cast<std::ptrdiff_t>(max_length), items.end());
}

ItemListSequence OrderItems(UserId user, std::span<const data::Rating> rated,
                            std::span<const ItemId> recommendations) {
  std::vector<data::Rating> by_time(rated.begin(), rated.end());
  std::sort(by_time.begin(), by_time.end(), [](const data::Rating& a, const data::Rating& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.item < b.item;
  });
  ItemListSequence seq;
  seq.user = user;
  std::unordered_set<ItemId> seen;
  for (const auto& r : by_time) {
    if (!seen.insert(r.item).second) continue;
    seq.items.push_back(r.item);
    seq.recommended.push_back(false);
  }
  for (ItemId j : recommendations) {
    if (!seen.insert(j).second) continue;
    seq.items.push_back(j);
    seq.recommended.push_back(true);
  }
  return seq;
}

std::string Attacker::Prefix(Attribute attribute) {
  return "att." + std::string(data::AttributeName(attribute)) + ".";
}

Attacker::Attacker(const AttackerShape& shape, Rng& rng) : shape_(shape) {
  const std::size_t d = shape.embed_dim, h = shape.hidden_dim;
  for (Attribute a : data::kAllAttributes) {
    const std::string p = Prefix(a);
    const auto c = static_cast<std::size_t>(data::NumClasses(a));
    params_.Add(p + "rnn.w_in", InitTensor({h, d}, d, shape.init, rng));
    params_.Add(p + "rnn.w_hh", InitTensor({h, h}, h, shape.init, rng));
    params_.Add(p + "rnn.b", InitTensor({h}, h, shape.init, rng));
    params_.Add(p + "head.w", InitTensor({c, h + d}, h + d, shape.init, rng));
    params_.Add(p + "head.b", InitTensor({c}, h + d, shape.init, rng));
  }
}

Attacker::Attacker(const AttackerShape& shape) : shape_(shape) {
  const std::size_t d = shape.embed_dim, h = shape.hidden_dim;
  for (Attribute a : data::kAllAttributes) {
    const std::string p = Prefix(a);
    const auto c = static_cast<std::size_t>(data::NumClasses(a));
    params_.Add(p + "rnn.w_in", Tensor({h, d}));
    params_.Add(p + "rnn.w_hh", Tensor({h, h}));
    params_.Add(p + "rnn.b", Tensor({h}));
    params_.Add(p + "head.w", Tensor({c, h + d}));
    params_.Add(p + "head.b", Tensor({c}));
  }
}

Attacker::Attacker(nn::ParameterSet params) {
  const Tensor& w_in = params.Get(Prefix(Attribute::kGender) + "rnn.w_in");
  shape_.hidden_dim = w_in.rows();
  shape_.embed_dim = w_in.cols();
  for (Attribute a : data::kAllAttributes) {
    const std::string p = Prefix(a);
    for (const char* leaf : {"rnn.w_in", "rnn.w_hh", "rnn.b", "head.w", "head.b"}) {
      params_.Add(p + leaf, params.Get(p + leaf));
    }
    if (params_.Get(p + "head.w").rows() != static_cast<std::size_t>(data::NumClasses(a)) ||
        params_.Get(p + "head.w").cols() != shape_.hidden_dim + shape_.embed_dim) {
      throw ValidationError("inconsistent attacker head shape for " + p);
    }
  }
}

Attacker::HeadVars Attacker::Bind(nn::Tape& tape, Attribute attribute, bool trainable) {
  const std::string p = Prefix(attribute);
  auto bind = [&](const char* leaf) {
    Tensor& t = params_.Get(p + leaf);
    return trainable ? tape.Parameter(t) : tape.ConstantRef(t);
  };
  return HeadVars{bind("rnn.w_in"), bind("rnn.w_hh"), bind("rnn.b"), bind("head.w"),
                  bind("head.b")};
}

Var Attacker::Probabilities(const HeadVars& head, Var user_embed, Var item_embed,
                            std::span<const UserId> users,
                            const std::vector<std::vector<ItemId>>& sequences) const {
  if (users.size() != sequences.size()) {
    throw ValidationError("attacker: users and sequences differ in length");
  }
  Var z = nn::RnnFinalStates(item_embed, sequences, head.w_in, head.w_hh, head.b_h);
  Var q = nn::GatherRows(user_embed, std::vector<std::int32_t>(users.begin(), users.end()));
  return nn::Softmax(nn::Affine(nn::Concat(z, q), head.head_w, head.head_b));
}

std::vector<double> Attacker::PredictAttribute(const Recommender& rec,
                                               const ItemListSequence& seq,
                                               Attribute attribute, std::size_t max_length) {
  nn::Tape tape;
  Var users = tape.ConstantRef(rec.params().Get(Recommender::kUserEmbed));
  Var items = tape.ConstantRef(rec.params().Get(Recommender::kItemEmbed));
  HeadVars head = Bind(tape, attribute, false);
  const std::vector<UserId> one{seq.user};
  Var probs = Probabilities(head, users, items, one, {seq.Tail(max_length)});
  const auto v = probs.value().values();
  return std::vector<double>(v.begin(), v.end());
}

Var AttackerLossSum(Attacker& attacker, nn::Tape& tape, bool train_attacker,
                    const Recommender::Vars& rec, const AttackerBatch& batch,
                    const data::AttributeTable& labels, std::span<const Attribute> attributes) {
  if (batch.users.empty()) throw ValidationError("attacker loss over an empty batch");
  if (attributes.empty()) throw ValidationError("attacker loss with no attributes");
  Var total;
  for (Attribute a : attributes) {
    std::vector<int> y;
    y.reserve(batch.users.size());
    for (UserId u : batch.users) y.push_back(labels.Label(u, a));
    Attacker::HeadVars head = attacker.Bind(tape, a, train_attacker);
    Var probs = attacker.Probabilities(head, rec.user_embed, rec.item_embed, batch.users,
                                       batch.sequences);
    Var ce = nn::Sum(nn::CrossEntropy(probs, y));
    total = total.valid() ? nn::Add(total, ce) : ce;
  }
  return nn::Scale(total, 1.0 / static_cast<double>(attributes.size()));
}

Var AttackerLoss(Attacker& attacker, nn::Tape& tape, bool train_attacker,
                 const Recommender::Vars& rec, const AttackerBatch& batch,
                 const data::AttributeTable& labels, std::span<const Attribute> attributes) {
  return nn::Scale(AttackerLossSum(attacker, tape, train_attacker, rec, batch, labels, attributes),
                   1.0 / static_cast<double>(batch.users.size()));
}

Var AttackerL2(Attacker& attacker, nn::Tape& tape, std::span<const Attribute> attributes) {
  Var total;
  for (Attribute a : attributes) {
    Attacker::HeadVars h = attacker.Bind(tape, a, true);
    for (Var p : {h.w_in, h.w_hh, h.b_h, h.head_w, h.head_b}) {
      Var sq = nn::SquaredNorm(p);
      total = total.valid() ? nn::Add(total, sq) : sq;
    }
  }
  return total;
}

}  // namespace rap::model
