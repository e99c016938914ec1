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

#include "rap/baselines/perturbation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rap/errors.h"

namespace rap::baselines {

using data::Rating;
using data::RatingDataset;

namespace {

std::vector<int> RoundedItemMeans(const RatingDataset& ds) {
  std::vector<double> sum(ds.num_items(), 0.0);
  std::vector<int> count(ds.num_items(), 0);
  for (const Rating& r : ds.ratings()) {
    sum[static_cast<std::size_t>(r.item)] += r.score;
    ++count[static_cast<std::size_t>(r.item)];
  }
  std::vector<int> out(ds.num_items(), 3);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (count[i] > 0) out[i] = std::clamp(static_cast<int>(std::lround(sum[i] / count[i])), 1, 5);
  }
  return out;
}

std::int64_t LastTimestamp(const RatingDataset& ds, UserId u) {
  std::int64_t last = 0;
  for (const Rating& r : ds.UserRatings(u)) last = std::max<std::int64_t>(last, r.timestamp);
  return last;
}

std::vector<bool> Membership(std::span<const UserId> users, std::size_t n) {
  std::vector<bool> in(n, false);
  for (UserId u : users) {
    if (u < 0 || static_cast<std::size_t>(u) >= n) throw ValidationError("user out of range");
    in[static_cast<std::size_t>(u)] = true;
  }
  return in;
}

}  // namespace

RatingDataset BlurMeObfuscate(const RatingDataset& ds, const data::AttributeTable& stats_labels,
                              const data::AttributeTable& own_labels,
                              std::span<const UserId> users, Attribute attribute,
                              const BlurMeOptions& options, BlurMeStats* stats) {
  if (options.fixed_k_add < 0 && !(options.fraction >= 0.0)) {
    throw ValidationError("BlurMe fraction must be >= 0");
  }
  const std::size_t m = ds.num_items();
  const auto num_classes = static_cast<std::size_t>(data::NumClasses(attribute));

  std::vector<std::vector<double>> freq(num_classes, std::vector<double>(m, 0.0));
  std::vector<double> class_size(num_classes, 0.0);
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    const auto uid = static_cast<UserId>(u);
    if (!stats_labels.HasLabels(uid)) continue;
    const auto c = static_cast<std::size_t>(stats_labels.Label(uid, attribute));
    class_size[c] += 1.0;
    for (ItemId j : ds.RatedItems(uid)) freq[c][static_cast<std::size_t>(j)] += 1.0;
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (class_size[c] == 0.0) continue;
    for (double& f : freq[c]) f /= class_size[c];
  }

  const std::vector<int> means = RoundedItemMeans(ds);
  std::vector<Rating> out = ds.ratings();
  BlurMeStats local;
  std::vector<double> score(m);
  std::vector<ItemId> candidates;
  for (UserId u : users) {
    const std::size_t n_h = ds.RatedItems(u).size();
    const std::size_t k_add =
        options.fixed_k_add >= 0
            ? static_cast<std::size_t>(options.fixed_k_add)
            : static_cast<std::size_t>(std::lround(options.fraction * static_cast<double>(n_h)));
    if (k_add == 0) continue;
    const auto own = static_cast<std::size_t>(own_labels.Label(u, attribute));
    candidates.clear();
    for (std::size_t i = 0; i < m; ++i) {
      if (ds.IsRated(u, static_cast<ItemId>(i))) continue;
      double best = -1.0;
      for (std::size_t c = 0; c < num_classes; ++c) {
        if (c != own && class_size[c] > 0.0) best = std::max(best, freq[c][i] - freq[own][i]);
      }
      score[i] = best;
      if (best > 0.0) candidates.push_back(static_cast<ItemId>(i));
    }
    // Random order first so that equal scores are broken by the seed.
    Rng rng = MakeRng(options.seed, {kStreamBlurMe, static_cast<std::uint64_t>(u)});
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const std::size_t take = std::min(k_add, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(take),
                      candidates.end(), [&](ItemId a, ItemId b) {
                        return score[static_cast<std::size_t>(a)] >
                               score[static_cast<std::size_t>(b)];
                      });
    if (take < k_add) local.capped_users.push_back(u);
    const std::int64_t ts = LastTimestamp(ds, u) + 1;
    for (std::size_t r = 0; r < take; ++r) {
      const ItemId j = candidates[r];
      out.push_back(Rating{u, j, means[static_cast<std::size_t>(j)], ts});
    }
    local.added += take;
  }
  if (stats) *stats = std::move(local);
  return RatingDataset(ds.num_users(), m, std::move(out), ds.user_ids(), ds.item_ids());
}

double KeepProbability(double epsilon, int num_categories) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (num_categories < 2) throw ValidationError("randomized response needs >= 2 categories");
  return 1.0 / (1.0 + static_cast<double>(num_categories - 1) * std::exp(-epsilon));
}

int RandomizedResponse(int category, double epsilon, Rng& rng, int num_categories) {
  if (category < 0 || category >= num_categories) {
    throw ValidationError("category out of range");
  }
  std::bernoulli_distribution keep(KeepProbability(epsilon, num_categories));
  if (keep(rng)) return category;
  std::uniform_int_distribution<int> other(0, num_categories - 2);
  const int v = other(rng);
  return v >= category ? v + 1 : v;
}

RatingDataset LdpPerturb(const RatingDataset& ds, double epsilon, std::span<const UserId> users,
                         std::uint64_t seed) {
  KeepProbability(epsilon);  // validates epsilon
  const std::vector<bool> perturbed = Membership(users, ds.num_users());
  const std::size_t m = ds.num_items();
  std::vector<Rating> out;
  out.reserve(ds.num_ratings() * 2);
  std::vector<ItemId> unrated;
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    const auto uid = static_cast<UserId>(u);
    const auto& own = ds.UserRatings(uid);
    if (!perturbed[u]) {
      out.insert(out.end(), own.begin(), own.end());
      continue;
    }
    Rng rng = MakeRng(seed, {kStreamLdp, static_cast<std::uint64_t>(u)});
    unrated.clear();
    for (std::size_t i = 0; i < m; ++i) {
      if (!ds.IsRated(uid, static_cast<ItemId>(i))) unrated.push_back(static_cast<ItemId>(i));
    }
    const std::size_t extra = std::min(own.size(), unrated.size());
    // Partial Fisher-Yates: the first `extra` entries are a uniform sample.
    for (std::size_t i = 0; i < extra; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, unrated.size() - 1);
      std::swap(unrated[i], unrated[pick(rng)]);
    }
    std::sort(unrated.begin(), unrated.begin() + static_cast<long>(extra));
    const std::int64_t ts = LastTimestamp(ds, uid);
    for (const Rating& r : own) {
      const int v = RandomizedResponse(r.score, epsilon, rng);
      if (v > 0) out.push_back(Rating{uid, r.item, v, r.timestamp});
    }
    for (std::size_t i = 0; i < extra; ++i) {
      const int v = RandomizedResponse(0, epsilon, rng);
      if (v > 0) out.push_back(Rating{uid, unrated[i], v, ts});
    }
  }
  return RatingDataset(ds.num_users(), m, std::move(out), ds.user_ids(), ds.item_ids());
}

}  // namespace rap::baselines
