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

#ifndef RAP_BASELINES_PERTURBATION_H_
#define RAP_BASELINES_PERTURBATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rap/data/movielens.h"
#include "rap/rng.h"

namespace rap::baselines {

using data::Attribute;
using data::ItemId;
using data::UserId;

struct BlurMeOptions {
  // k_add = round(fraction * |I_h|) unless fixed_k_add >= 0.
  double fraction = 0.1;
  int fixed_k_add = -1;
  std::uint64_t seed = 1;
};

struct BlurMeStats {
  std::size_t added = 0;
  // Users that got fewer than k_add items for lack of candidates.
  std::vector<UserId> capped_users;
};

// Adds to each listed user the unrated items whose rating frequency is most
// raised in some other class relative to the user's own class:
//
//   score(i) = max_{c != own} P(rated i | c) - P(rated i | own)
//
// Class frequencies come from the users visible in `stats_labels`; the
// user's own class comes from `own_labels` (the user knows it). Only items
// with a positive score are eligible; each is rated with its rounded global
// mean. Existing ratings are never touched.
data::RatingDataset BlurMeObfuscate(const data::RatingDataset& ds,
                                    const data::AttributeTable& stats_labels,
                                    const data::AttributeTable& own_labels,
                                    std::span<const UserId> users, Attribute attribute,
                                    const BlurMeOptions& options, BlurMeStats* stats = nullptr);

// Categories: 0 = unrated, r = rating r (the r/5 levels of the scaled scale).
inline constexpr int kLdpCategories = 6;

// e^eps / (e^eps + k - 1), evaluated without overflow.
double KeepProbability(double epsilon, int num_categories = kLdpCategories);

// k-ary randomized response on one category value.
int RandomizedResponse(int category, double epsilon, Rng& rng,
                       int num_categories = kLdpCategories);

// Applies randomized response to each listed user's item universe: the rated
// items plus an equal-size uniform sample of unrated ones. Items reported as
// 0 are dropped, others carry the reported rating.
data::RatingDataset LdpPerturb(const data::RatingDataset& ds, double epsilon,
                               std::span<const UserId> users, std::uint64_t seed);

}  // namespace rap::baselines

#endif  // RAP_BASELINES_PERTURBATION_H_
