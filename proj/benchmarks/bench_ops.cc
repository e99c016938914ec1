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

Tensor Random(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

void BM_AffineForwardBackward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto in = static_cast<std::size_t>(state.range(1));
  const auto out = static_cast<std::size_t>(state.range(2));
  Tensor x = Random({batch, in}, 1), w = Random({out, in}, 2), b = Random({out}, 3);
  for (auto _ : state) {
    Tape tape;
    Var y = Affine(tape.ConstantRef(x), tape.Parameter(w), tape.Parameter(b));
    tape.Backward(Sum(Relu(y)));
    benchmark::DoNotOptimize(w.grad().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch * in * out));
}

BENCHMARK(BM_AffineForwardBackward)
    ->Args({32, 70, 20})
    ->Args({3200, 70, 20})
    ->Args({32, 1682, 100});

void BM_SoftmaxCrossEntropy(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto classes = static_cast<std::size_t>(state.range(1));
  Tensor logits = Random({batch, classes}, 4);
  std::vector<int> labels(batch);
  for (std::size_t i = 0; i < batch; ++i) labels[i] = static_cast<int>(i % classes);
  for (auto _ : state) {
    Tape tape;
    Var p = Softmax(tape.Parameter(logits));
    tape.Backward(Mean(CrossEntropy(p, labels)));
    benchmark::DoNotOptimize(logits.grad().data());
  }
}

BENCHMARK(BM_SoftmaxCrossEntropy)->Args({32, 2})->Args({32, 21})->Args({1024, 21});

}  // namespace
}  // namespace rap::nn
