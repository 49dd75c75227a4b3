// Copyright 2026 The minobs authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace minobs {

/// Derives an independent stream seed from a base seed. splitmix64 finalizer;
/// distinct streams never share an engine state.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

/// mt19937_64 plus hand-rolled bounded draws. The engine's output sequence is
/// pinned by the standard; avoiding std distributions keeps replays identical
/// across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound), bound >= 1. Rejection-sampled, unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit =
        (std::numeric_limits<std::uint64_t>::max() / bound) * bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform angle in [0, 2*pi).
  double angle() { return unit() * 2.0 * std::numbers::pi; }

 private:
  std::mt19937_64 engine_;
};

/// Seeded Fisher-Yates shuffle of [0, n).
inline std::vector<std::uint32_t> random_permutation(std::uint32_t n,
                                                     std::uint64_t seed) {
  std::vector<std::uint32_t> p(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  SeededRng rng(seed);
  for (std::uint32_t i = n; i > 1; --i) {
    const auto j = static_cast<std::uint32_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace minobs
