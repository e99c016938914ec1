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

#include <random>

#include "benchmark/benchmark.h"
#include "rap/nn/ops.h"
#include "rap/nn/tape.h"

namespace rap::nn {
namespace {

// A batch of item sequences over a 1682-row embedding table, with lengths
// spread up to the truncation limit like real profiles.
void BM_RnnFinalStates(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto max_len = static_cast<std::size_t>(state.range(1));
  const std::size_t d = 70, h = 100, items = 1682;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  auto fill = [&](Shape s) {
    Tensor t(std::move(s));
    for (double& v : t.values()) v = dist(rng);
    return t;
  };
  Tensor table = fill({items, d}), w_in = fill({h, d}), w_hh = fill({h, h}), b = fill({h});
  std::uniform_int_distribution<std::int32_t> item(0, static_cast<std::int32_t>(items) - 1);
  std::uniform_int_distribution<std::size_t> len(max_len / 4, max_len);
  std::vector<std::vector<std::int32_t>> seqs(batch);
  for (auto& s : seqs) {
    s.resize(len(rng));
    for (auto& j : s) j = item(rng);
  }
  for (auto _ : state) {
    Tape tape;
    Var z = RnnFinalStates(tape.Parameter(table), seqs, tape.Parameter(w_in),
                           tape.Parameter(w_hh), tape.Parameter(b));
    tape.Backward(Sum(z));
    benchmark::DoNotOptimize(w_hh.grad().data());
  }
}

BENCHMARK(BM_RnnFinalStates)->Args({32, 50})->Args({32, 200})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rap::nn
