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
#include <tuple>
#include <vector>

#include "minobs/channel.hpp"
#include "minobs/povm.hpp"

namespace minobs::testfix {

struct Cell {
  double value;
  std::uint32_t lo;
  std::uint32_t hi;  // half-open
};

/// Indicator POVM over contiguous cells; every unclaimed state goes to the
/// NULL complement so the weights sum to 1 everywhere.
inline Povm range_povm(std::uint32_t n, const std::vector<Cell>& cells,
                       double epsilon = 0.5) {
  std::vector<bool> claimed(n, false);
  std::vector<PovmComponent> components;
  components.push_back(PovmComponent::from_support(0.0, {}));  // patched below
  for (const Cell& c : cells) {
    std::vector<std::uint32_t> support;
    for (std::uint32_t s = c.lo; s < c.hi; ++s) {
      support.push_back(s);
      claimed[s] = true;
    }
    components.push_back(PovmComponent::from_support(c.value, std::move(support)));
  }
  std::vector<std::uint32_t> rest;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!claimed[s]) rest.push_back(s);
  }
  components[0] = PovmComponent::from_support(0.0, std::move(rest));
  return Povm(ChannelSpace{n}, epsilon, std::move(components));
}

/// Same but with explicit supports per component.
inline Povm support_povm(std::uint32_t n,
                         const std::vector<std::pair<double, std::vector<std::uint32_t>>>& comps,
                         double epsilon = 0.5) {
  std::vector<bool> claimed(n, false);
  std::vector<PovmComponent> components;
  components.push_back(PovmComponent::from_support(0.0, {}));
  for (const auto& [value, support] : comps) {
    for (std::uint32_t s : support) claimed[s] = true;
    components.push_back(PovmComponent::from_support(value, support));
  }
  std::vector<std::uint32_t> rest;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!claimed[s]) rest.push_back(s);
  }
  components[0] = PovmComponent::from_support(0.0, std::move(rest));
  return Povm(ChannelSpace{n}, epsilon, std::move(components));
}

/// The 16-cell observable pair over N = 1024 used by the commutation
/// experiments: identical cell structure (one cell per 64-state block),
/// distinct value labels.
struct BlockPair {
  Povm a;
  Povm b;
  Partition blocks;
};

inline BlockPair block_pair() {
  constexpr std::uint32_t kN = 1024;
  std::vector<Cell> cells_a;
  std::vector<Cell> cells_b;
  for (std::uint32_t k = 0; k < 16; ++k) {
    cells_a.push_back({static_cast<double>(k + 1), 64 * k, 64 * (k + 1)});
    cells_b.push_back({static_cast<double>(k + 101), 64 * k, 64 * (k + 1)});
  }
  return BlockPair{range_povm(kN, cells_a), range_povm(kN, cells_b),
                   equal_blocks(ChannelSpace{kN}, 16)};
}

/// The N = 256 single-triple observer fixture: identify accepts [0, 254),
/// selector slot 1 is hot on [0, 253), and the binary observable splits
/// [0, 253) at 127. Block layout keeps both cells flow-invariant under a
/// block-diagonal dynamics.
struct MooreFixture {
  PovmTriple triple;
  Partition blocks;
};

inline MooreFixture moore_fixture() {
  constexpr std::uint32_t kN = 256;
  Partition blocks = {{}, {}, {253}, {254, 255}};
  for (std::uint32_t s = 0; s < 127; ++s) blocks[0].push_back(s);
  for (std::uint32_t s = 127; s < 253; ++s) blocks[1].push_back(s);
  return MooreFixture{
      PovmTriple{1,
                 range_povm(kN, {{5.0, 0, 254}}),
                 range_povm(kN, {{1.0, 0, 253}}),
                 {range_povm(kN, {{1.0, 0, 127}, {2.0, 127, 253}})},
                 {5.0}},
      std::move(blocks)};
}

}  // namespace minobs::testfix
