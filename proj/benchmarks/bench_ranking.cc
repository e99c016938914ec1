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

#include <vector>

#include "benchmark/benchmark.h"
#include "rap/model/recommender.h"
#include "rap/rng.h"

namespace rap::model {
namespace {

void BM_RankerBuild(benchmark::State& state) {
  Rng rng(1);
  const Recommender rec({943, 1682, 70, 20}, rng);
  for (auto _ : state) {
    Recommender::Ranker ranker(rec);
    benchmark::DoNotOptimize(&ranker);
  }
}

BENCHMARK(BM_RankerBuild)->Unit(benchmark::kMicrosecond);

void BM_TopK(benchmark::State& state) {
  Rng rng(1);
  const Recommender rec({943, 1682, 70, 20}, rng);
  const Recommender::Ranker ranker(rec);
  std::vector<ItemId> rated;
  for (ItemId j = 0; j < 1682; j += 17) rated.push_back(j);
  const auto k = static_cast<std::size_t>(state.range(0));
  UserId user = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ranker.TopK(user, rated, k));
    user = (user + 1) % 943;
  }
}

BENCHMARK(BM_TopK)->Arg(35)->Arg(200);

}  // namespace
}  // namespace rap::model
