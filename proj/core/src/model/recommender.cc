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

#include "rap/model/recommender.h"

#include <algorithm>
#include <numeric>

#include "rap/errors.h"
#include "rap/nn/ops.h"

namespace rap::model {

using nn::Shape;
using nn::Tensor;
using nn::Var;

namespace {

Tensor UniformTensor(Shape shape, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = unit(rng);
  return t;
}

}  // namespace

Recommender::Recommender(const RecommenderShape& shape, Rng& rng) : shape_(shape) {
  // Fixed creation order keeps initialization reproducible.
  params_.Add(kUserEmbed, UniformTensor({shape.num_users, shape.embed_dim}, rng));
  params_.Add(kItemEmbed, UniformTensor({shape.num_items, shape.embed_dim}, rng));
  params_.Add(kHiddenW, UniformTensor({shape.hidden_dim, shape.embed_dim}, rng));
  params_.Add(kHiddenB, UniformTensor({shape.hidden_dim}, rng));
  params_.Add(kOutW, UniformTensor({1, 2 * shape.hidden_dim}, rng));
  params_.Add(kOutB, UniformTensor({1}, rng));
}

Recommender::Recommender(const RecommenderShape& shape) : shape_(shape) {
  params_.Add(kUserEmbed, Tensor({shape.num_users, shape.embed_dim}));
  params_.Add(kItemEmbed, Tensor({shape.num_items, shape.embed_dim}));
  params_.Add(kHiddenW, Tensor({shape.hidden_dim, shape.embed_dim}));
  params_.Add(kHiddenB, Tensor({shape.hidden_dim}));
  params_.Add(kOutW, Tensor({1, 2 * shape.hidden_dim}));
  params_.Add(kOutB, Tensor({1}));
}

Recommender::Recommender(nn::ParameterSet params) {
  const Tensor& users = params.Get(kUserEmbed);
  const Tensor& items = params.Get(kItemEmbed);
  const Tensor& hidden = params.Get(kHiddenW);
  shape_ = RecommenderShape{users.rows(), items.rows(), users.cols(), hidden.rows()};
  if (items.cols() != shape_.embed_dim || hidden.cols() != shape_.embed_dim ||
      params.Get(kHiddenB).size() != shape_.hidden_dim ||
      params.Get(kOutW).size() != 2 * shape_.hidden_dim || params.Get(kOutB).size() != 1) {
    throw ValidationError("inconsistent recommender parameter shapes");
  }
  for (const char* name : {kUserEmbed, kItemEmbed, kHiddenW, kHiddenB, kOutW, kOutB}) {
    params_.Add(name, params.Get(name));
  }
}

Recommender::Vars Recommender::Bind(nn::Tape& tape, bool trainable) {
  auto bind = [&](const char* name) {
    Tensor& p = params_.Get(name);
    return trainable ? tape.Parameter(p) : tape.ConstantRef(p);
  };
  return Vars{bind(kUserEmbed), bind(kItemEmbed), bind(kHiddenW),
              bind(kHiddenB),   bind(kOutW),      bind(kOutB)};
}

void Recommender::CheckUser(UserId h) const {
  if (h < 0 || static_cast<std::size_t>(h) >= shape_.num_users) {
    throw ValidationError("user index " + std::to_string(h) + " out of range");
  }
}

void Recommender::CheckItem(ItemId j) const {
  if (j < 0 || static_cast<std::size_t>(j) >= shape_.num_items) {
    throw ValidationError("item index " + std::to_string(j) + " out of range");
  }
}

void Recommender::Hidden(const double* embed, double* out) const {
  const Tensor& w = params_.Get(kHiddenW);
  const Tensor& b = params_.Get(kHiddenB);
  const std::size_t d = shape_.embed_dim;
  for (std::size_t r = 0; r < shape_.hidden_dim; ++r) {
    double acc = 0;
    const double* row = w.data() + r * d;
    for (std::size_t k = 0; k < d; ++k) acc += row[k] * embed[k];
    acc += b[r];
    out[r] = acc > 0 ? acc : 0.0;
  }
}

double Recommender::Output(const double* user_hidden, const double* item_hidden) const {
  const Tensor& w = params_.Get(kOutW);
  const std::size_t hd = shape_.hidden_dim;
  double acc = 0;
  for (std::size_t r = 0; r < hd; ++r) acc += w[r] * user_hidden[r];
  for (std::size_t r = 0; r < hd; ++r) acc += w[hd + r] * item_hidden[r];
  acc += params_.Get(kOutB)[0];
  return acc > 0 ? acc : 0.0;
}

std::pair<double, double> Recommender::ScorePair(UserId h, ItemId j, ItemId k) const {
  CheckUser(h);
  CheckItem(j);
  CheckItem(k);
  const std::size_t d = shape_.embed_dim;
  const Tensor& users = params_.Get(kUserEmbed);
  const Tensor& items = params_.Get(kItemEmbed);
  std::vector<double> hu(shape_.hidden_dim), hj(shape_.hidden_dim), hk(shape_.hidden_dim);
  Hidden(users.data() + static_cast<std::size_t>(h) * d, hu.data());
  Hidden(items.data() + static_cast<std::size_t>(j) * d, hj.data());
  Hidden(items.data() + static_cast<std::size_t>(k) * d, hk.data());
  return {Output(hu.data(), hj.data()), Output(hu.data(), hk.data())};
}

double Recommender::ScoreItem(UserId h, ItemId j) const {
  auto [y, y_prime] = ScorePair(h, j, j);
  return 0.5 * (y + y_prime);
}

Recommender::Ranker::Ranker(const Recommender& model)
    : model_(model), item_hidden_(model.shape_.num_items * model.shape_.hidden_dim) {
  const std::size_t d = model.shape_.embed_dim;
  const Tensor& items = model.params_.Get(kItemEmbed);
  for (std::size_t j = 0; j < model.shape_.num_items; ++j) {
    model.Hidden(items.data() + j * d, item_hidden_.data() + j * model.shape_.hidden_dim);
  }
}

std::vector<double> Recommender::Ranker::ScoreAll(UserId h) const {
  model_.CheckUser(h);
  const auto& shape = model_.shape_;
  std::vector<double> hu(shape.hidden_dim);
  model_.Hidden(model_.params_.Get(kUserEmbed).data() +
                    static_cast<std::size_t>(h) * shape.embed_dim,
                hu.data());
  std::vector<double> scores(shape.num_items);
  for (std::size_t j = 0; j < shape.num_items; ++j) {
    const double y = model_.Output(hu.data(), item_hidden_.data() + j * shape.hidden_dim);
    scores[j] = 0.5 * (y + y);
  }
  return scores;
}

std::vector<ItemId> Recommender::Ranker::TopK(UserId h, std::span<const ItemId> rated,
                                              std::size_t k) const {
  const std::size_t m = model_.shape_.num_items;
  std::vector<ItemId> candidates;
  candidates.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::binary_search(rated.begin(), rated.end(), static_cast<ItemId>(j))) {
      candidates.push_back(static_cast<ItemId>(j));
    }
  }
  if (k > candidates.size()) {
    throw ValidationError("top-k: K=" + std::to_string(k) + " exceeds the " +
                          std::to_string(candidates.size()) + " unrated items");
  }
  const std::vector<double> scores = ScoreAll(h);
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), [&](ItemId a, ItemId b) {
                      const double sa = scores[static_cast<std::size_t>(a)];
                      const double sb = scores[static_cast<std::size_t>(b)];
                      return sa != sb ? sa > sb : a < b;
                    });
  candidates.resize(k);
  return candidates;
}

Var RecommenderL2(const Recommender::Vars& v) {
  Var total = nn::SquaredNorm(v.user_embed);
  for (Var p : {v.item_embed, v.hidden_w, v.hidden_b, v.out_w, v.out_b}) {
    total = nn::Add(total, nn::SquaredNorm(p));
  }
  return total;
}

Var BprLoss(const Recommender::Vars& v, std::span<const Triplet> triplets,
            std::size_t num_users, double lambda) {
  if (triplets.empty()) throw ValidationError("bpr loss over an empty batch");
  if (num_users == 0) throw ValidationError("bpr loss needs a positive user count");
  nn::Tape& tape = *v.user_embed.tape();
  const std::size_t n = triplets.size();
  std::vector<std::int32_t> users(n), firsts(n), seconds(n);
  Tensor labels({n, 1});
  for (std::size_t i = 0; i < n; ++i) {
    users[i] = triplets[i].user;
    firsts[i] = triplets[i].first;
    seconds[i] = triplets[i].second;
    labels[i] = static_cast<double>(triplets[i].label);
  }
  auto tower = [&](Var embed) {
    return nn::Relu(nn::Affine(embed, v.hidden_w, v.hidden_b));
  };
  Var hu = tower(nn::GatherRows(v.user_embed, users));
  Var ha = tower(nn::GatherRows(v.item_embed, firsts));
  Var hb = tower(nn::GatherRows(v.item_embed, seconds));
  Var ya = nn::Relu(nn::Affine(nn::Concat(hu, ha), v.out_w, v.out_b));
  Var yb = nn::Relu(nn::Affine(nn::Concat(hu, hb), v.out_w, v.out_b));
  Var margin = nn::Mul(nn::Sub(ya, yb), tape.Constant(std::move(labels)));
  Var loss = nn::Scale(nn::Sum(nn::LogSigmoid(margin)), -1.0 / static_cast<double>(num_users));
  if (lambda != 0.0) loss = nn::Add(loss, nn::Scale(RecommenderL2(v), lambda));
  return loss;
}

std::vector<Triplet> SampleTriplets(const data::RatingDataset& train,
                                    std::span<const UserId> users,
                                    std::size_t negatives_per_positive, Rng& rng,
                                    std::vector<UserId>* skipped) {
  const std::size_t m = train.num_items();
  std::vector<Triplet> out;
  std::bernoulli_distribution flip(0.5);
  std::vector<ItemId> unrated;
  for (UserId h : users) {
    const auto& rated = train.RatedItems(h);
    if (rated.empty()) continue;
    if (rated.size() >= m) {
      if (skipped) skipped->push_back(h);
      continue;
    }
    // Rejection sampling while the unrated set is the majority, an explicit
    // list otherwise; both are exactly uniform.
    const bool dense = rated.size() * 2 > m;
    if (dense) {
      unrated.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (!std::binary_search(rated.begin(), rated.end(), static_cast<ItemId>(j))) {
          unrated.push_back(static_cast<ItemId>(j));
        }
      }
    }
    std::uniform_int_distribution<std::size_t> any_item(0, m - 1);
    std::uniform_int_distribution<std::size_t> any_unrated(0, dense ? unrated.size() - 1 : 0);
    for (ItemId j : rated) {
      for (std::size_t n = 0; n < negatives_per_positive; ++n) {
        ItemId k;
        if (dense) {
          k = unrated[any_unrated(rng)];
        } else {
          do {
            k = static_cast<ItemId>(any_item(rng));
          } while (std::binary_search(rated.begin(), rated.end(), k));
        }
        if (flip(rng)) {
          out.push_back(Triplet{h, k, j, -1});
        } else {
          out.push_back(Triplet{h, j, k, +1});
        }
      }
    }
  }
  return out;
}

}  // namespace rap::model
