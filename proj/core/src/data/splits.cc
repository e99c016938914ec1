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

#include "rap/data/splits.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rap/errors.h"
#include "rap/rng.h"

namespace rap::data {
namespace {

using nlohmann::json;

// First l entries of a seeded shuffle of the user's items.
std::vector<ItemId> SampleItems(const std::vector<ItemId>& items, int l,
                                std::uint64_t seed, std::uint64_t stream,
                                UserId user) {
  std::vector<ItemId> pool = items;
  Rng rng = MakeRng(seed, {stream, static_cast<std::uint64_t>(user)});
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(l));
  std::sort(pool.begin(), pool.end());
  return pool;
}

json EncodeItemLists(const RatingDataset& ds,
                     const std::vector<std::vector<ItemId>>& lists) {
  json out = json::object();
  for (std::size_t u = 0; u < lists.size(); ++u) {
    if (lists[u].empty()) continue;
    json items = json::array();
    for (ItemId i : lists[u]) items.push_back(ds.item_ids().Decode(i));
    out[std::to_string(ds.user_ids().Decode(static_cast<UserId>(u)))] = items;
  }
  return out;
}

std::vector<std::vector<ItemId>> DecodeItemLists(const RatingDataset& ds,
                                                 const json& j) {
  std::vector<std::vector<ItemId>> lists(ds.num_users());
  for (const auto& [key, items] : j.items()) {
    UserId u = ds.user_ids().Encode(std::stoll(key));
    for (const auto& raw : items) {
      ItemId item = ds.item_ids().Encode(raw.get<std::int64_t>());
      if (!ds.IsRated(u, item)) {
        throw ValidationError("manifest lists unrated item for user " + key);
      }
      lists[static_cast<std::size_t>(u)].push_back(item);
    }
    std::sort(lists[static_cast<std::size_t>(u)].begin(),
              lists[static_cast<std::size_t>(u)].end());
  }
  return lists;
}

json EncodeUsers(const RatingDataset& ds, const std::vector<UserId>& users) {
  json out = json::array();
  for (UserId u : users) out.push_back(ds.user_ids().Decode(u));
  return out;
}

std::vector<UserId> DecodeUsers(const RatingDataset& ds, const json& j) {
  std::vector<UserId> users;
  for (const auto& raw : j) users.push_back(ds.user_ids().Encode(raw.get<std::int64_t>()));
  std::sort(users.begin(), users.end());
  return users;
}

RecSplit AssembleRecSplit(const RatingDataset& ds, int l, std::uint64_t seed,
                          std::vector<std::vector<ItemId>> heldout) {
  RecSplit split;
  split.l = l;
  split.seed = seed;
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    auto user = static_cast<UserId>(u);
    if (heldout[u].empty()) {
      split.excluded_users.push_back(user);
    } else if (heldout[u].size() == ds.RatedItems(user).size()) {
      split.degenerate_users.push_back(user);
    }
  }
  split.train = ds.WithoutItems(heldout);
  split.heldout = std::move(heldout);
  return split;
}

}  // namespace

RecSplit SplitRecommendation(const RatingDataset& ds, int l, std::uint64_t seed) {
  if (l <= 0) throw ValidationError("l must be positive, got " + std::to_string(l));
  std::vector<std::vector<ItemId>> heldout(ds.num_users());
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    auto user = static_cast<UserId>(u);
    const auto& items = ds.RatedItems(user);
    if (items.size() < static_cast<std::size_t>(l)) continue;
    heldout[u] = SampleItems(items, l, seed, kStreamRecSplit, user);
  }
  return AssembleRecSplit(ds, l, seed, std::move(heldout));
}

std::size_t TrainUserCount(std::size_t num_users, double train_fraction) {
  return static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(num_users) + 1e-9));
}

AttackSplit SplitAttacker(const RatingDataset& ds, double train_fraction, int l,
                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  if (l <= 0) throw ValidationError("l must be positive, got " + std::to_string(l));
  std::vector<UserId> users(ds.num_users());
  std::iota(users.begin(), users.end(), 0);
  Rng rng = MakeRng(seed, {kStreamAttackSplit});
  std::shuffle(users.begin(), users.end(), rng);

  AttackSplit split;
  split.train_fraction = train_fraction;
  split.l = l;
  split.seed = seed;
  const std::size_t n_train = TrainUserCount(users.size(), train_fraction);
  split.train_users.assign(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_users.assign(users.begin() + static_cast<std::ptrdiff_t>(n_train), users.end());
  std::sort(split.train_users.begin(), split.train_users.end());
  std::sort(split.test_users.begin(), split.test_users.end());

  split.removed.assign(ds.num_users(), {});
  for (UserId u : split.test_users) {
    const auto& items = ds.RatedItems(u);
    if (items.size() <= static_cast<std::size_t>(l)) {
      split.short_profile_users.push_back(u);
      continue;
    }
    split.removed[static_cast<std::size_t>(u)] =
        SampleItems(items, l, seed, kStreamAttackSplit, u);
  }
  split.observed = ds.WithoutItems(split.removed);
  return split;
}

std::string RecSplitToJson(const RecSplit& split) {
  json j;
  j["kind"] = "recommendation";
  j["seed"] = split.seed;
  j["l"] = split.l;
  j["heldout"] = EncodeItemLists(split.train, split.heldout);
  return j.dump();
}

RecSplit RecSplitFromJson(const RatingDataset& ds, const std::string& text) try {
  json j = json::parse(text);
  if (j.value("kind", "") != "recommendation") {
    throw ValidationError("not a recommendation split manifest");
  }
  auto heldout = DecodeItemLists(ds, j.at("heldout"));
  return AssembleRecSplit(ds, j.at("l").get<int>(), j.at("seed").get<std::uint64_t>(),
                          std::move(heldout));
} catch (const json::exception& e) {
  throw ValidationError(std::string("malformed split manifest: ") + e.what());
}

std::string AttackSplitToJson(const AttackSplit& split) {
  json j;
  j["kind"] = "attack";
  j["seed"] = split.seed;
  j["l"] = split.l;
  j["train_fraction"] = split.train_fraction;
  j["train_users"] = EncodeUsers(split.observed, split.train_users);
  j["test_users"] = EncodeUsers(split.observed, split.test_users);
  j["removed"] = EncodeItemLists(split.observed, split.removed);
  return j.dump();
}

AttackSplit AttackSplitFromJson(const RatingDataset& ds, const std::string& text) try {
  json j = json::parse(text);
  if (j.value("kind", "") != "attack") throw ValidationError("not an attack split manifest");
  AttackSplit split;
  split.seed = j.at("seed").get<std::uint64_t>();
  split.l = j.at("l").get<int>();
  split.train_fraction = j.at("train_fraction").get<double>();
  split.train_users = DecodeUsers(ds, j.at("train_users"));
  split.test_users = DecodeUsers(ds, j.at("test_users"));
  if (split.train_users.size() + split.test_users.size() != ds.num_users()) {
    throw ValidationError("manifest partition does not cover every user");
  }
  split.removed = DecodeItemLists(ds, j.at("removed"));
  for (UserId u : split.test_users) {
    if (split.removed[static_cast<std::size_t>(u)].empty()) {
      split.short_profile_users.push_back(u);
    }
  }
  split.observed = ds.WithoutItems(split.removed);
  return split;
} catch (const json::exception& e) {
  throw ValidationError(std::string("malformed split manifest: ") + e.what());
}

}  // namespace rap::data
