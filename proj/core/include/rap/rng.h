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

#ifndef RAP_RNG_H_
#define RAP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rap {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for a named sub-stream, e.g. DeriveSeed(seed, {kStreamSplit, user}).
inline std::uint64_t DeriveSeed(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = MixSeed(seed);
  for (std::uint64_t p : path) s = MixSeed(s ^ MixSeed(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng MakeRng(std::uint64_t seed,
                   std::initializer_list<std::uint64_t> path = {}) {
  return Rng(DeriveSeed(seed, path));
}

// Stream tags keep unrelated consumers of one run seed independent.
enum Stream : std::uint64_t {
  kStreamRecSplit = 1,
  kStreamAttackSplit = 2,
  kStreamRecInit = 3,
  kStreamAttInit = 4,
  kStreamBatches = 5,
  kStreamTriplets = 6,
  kStreamAdversary = 7,
  kStreamBlurMe = 8,
  kStreamLdp = 9,
};

}  // namespace rap

#endif  // RAP_RNG_H_
