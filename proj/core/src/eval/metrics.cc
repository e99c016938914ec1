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

#include "rap/eval/metrics.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "rap/errors.h"

namespace rap::eval {

namespace {

std::size_t Hits(std::span<const ItemId> heldout, std::span<const ItemId> recommended,
                 std::size_t k) {
  if (k == 0) throw ValidationError("K must be positive");
  if (recommended.size() < k) {
    throw ValidationError("only " + std::to_string(recommended.size()) +
                          " recommendations for K=" + std::to_string(k));
  }
  const std::set<ItemId> relevant(heldout.begin(), heldout.end());
  const std::set<ItemId> top(recommended.begin(), recommended.begin() + static_cast<long>(k));
  std::size_t hits = 0;
  for (ItemId j : top) hits += relevant.count(j);
  return hits;
}

}  // namespace

double PrecisionAtK(std::span<const ItemId> heldout, std::span<const ItemId> recommended,
                    std::size_t k) {
  return static_cast<double>(Hits(heldout, recommended, k)) / static_cast<double>(k);
}

double RecallAtK(std::span<const ItemId> heldout, std::span<const ItemId> recommended,
                 std::size_t k) {
  const std::set<ItemId> relevant(heldout.begin(), heldout.end());
  if (relevant.empty()) throw ValidationError("recall needs a nonempty heldout set");
  return static_cast<double>(Hits(heldout, recommended, k)) /
         static_cast<double>(relevant.size());
}

double BinaryAuc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size()) throw ValidationError("AUC: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ValidationError("AUC undefined: only one class present");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double MicroAuc(const std::vector<std::vector<double>>& probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) throw ValidationError("AUC: probs and labels differ");
  if (probs.empty()) throw ValidationError("AUC of an empty test set");
  const std::size_t c = probs.front().size();
  std::set<int> present;
  std::vector<double> scores;
  std::vector<std::uint8_t> target;
  scores.reserve(probs.size() * c);
  target.reserve(probs.size() * c);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != c) throw ValidationError("AUC: ragged probability rows");
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw ValidationError("AUC: label out of range");
    }
    present.insert(labels[i]);
    for (std::size_t k = 0; k < c; ++k) {
      scores.push_back(probs[i][k]);
      target.push_back(static_cast<std::size_t>(labels[i]) == k ? 1 : 0);
    }
  }
  if (present.size() < 2) throw ValidationError("AUC undefined: single-class test set");
  return BinaryAuc(scores, target);
}

}  // namespace rap::eval
