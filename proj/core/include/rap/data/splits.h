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

#ifndef RAP_DATA_SPLITS_H_
#define RAP_DATA_SPLITS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rap/data/movielens.h"

namespace rap::data {

// Recommendation protocol: l rated items per user are held out.
struct RecSplit {
  RatingDataset train;
  // heldout[h] has exactly l items for evaluable users, empty otherwise.
  std::vector<std::vector<ItemId>> heldout;
  // Users with fewer than l ratings; kept whole in train, not evaluated.
  std::vector<UserId> excluded_users;
  // Users whose whole profile was held out (n_h == l).
  std::vector<UserId> degenerate_users;
  int l = 0;
  std::uint64_t seed = 0;

  bool IsEvaluable(UserId user) const {
    return !heldout[static_cast<std::size_t>(user)].empty();
  }
};

RecSplit SplitRecommendation(const RatingDataset& ds, int l, std::uint64_t seed);

// Attack protocol: a user partition; test users lose l random ratings.
struct AttackSplit {
  std::vector<UserId> train_users;  // ascending
  std::vector<UserId> test_users;   // ascending
  // Train users intact, test users with their removed items dropped.
  RatingDataset observed;
  // removed[h] is empty for train users and for short test profiles.
  std::vector<std::vector<ItemId>> removed;
  // Test users with at most l ratings; their profile is left intact.
  std::vector<UserId> short_profile_users;
  double train_fraction = 0.8;
  int l = 0;
  std::uint64_t seed = 0;
};

AttackSplit SplitAttacker(const RatingDataset& ds, double train_fraction, int l,
                          std::uint64_t seed);

// floor(frac * n), robust to representation error in frac.
std::size_t TrainUserCount(std::size_t num_users, double train_fraction);

// JSON manifests with raw (file) ids, for bit-exact re-runs.
std::string RecSplitToJson(const RecSplit& split);
RecSplit RecSplitFromJson(const RatingDataset& ds, const std::string& json);
std::string AttackSplitToJson(const AttackSplit& split);
AttackSplit AttackSplitFromJson(const RatingDataset& ds, const std::string& json);

}  // namespace rap::data

#endif  // RAP_DATA_SPLITS_H_
