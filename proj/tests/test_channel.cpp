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

#include <sstream>
#include <unordered_set>

#include "doctest.h"
#include "minobs/channel.hpp"
#include "minobs/rng.hpp"

using namespace minobs;

TEST_CASE("step: identity dynamics leaves every state in place") {
  const auto d = make_dynamics(DynamicsKind::identity, 0, ChannelSpace{16});
  CHECK(step(FineState{5}, d) == FineState{5});
  for (std::uint32_t s = 0; s < 16; ++s) {
    CHECK(step(FineState{s}, d) == FineState{s});
    CHECK(step_inverse(FineState{s}, d) == FineState{s});
  }
}

TEST_CASE("step: N=2 swap permutation") {
  const auto d = ReversibleDynamics::from_table({1, 0});
  CHECK(step(FineState{0}, d) == FineState{1});
  CHECK(step_inverse(FineState{1}, d) == FineState{0});
}

TEST_CASE("step: fixed-seed replay oracle") {
  // Value frozen from the first derivation run; the same seed must reproduce
  // it forever.
  const auto d = make_dynamics(DynamicsKind::generated, 2024, ChannelSpace{1024});
  CHECK(step(FineState{7}, d).index == 169);

  const auto replay =
      make_dynamics(DynamicsKind::generated, 2024, ChannelSpace{1024});
  CHECK(d.table() == replay.table());
}

TEST_CASE("step: out-of-range index raises a domain error") {
  const auto d = make_dynamics(DynamicsKind::identity, 0, ChannelSpace{8});
  CHECK_THROWS_AS(step(FineState{8}, d), DomainError);
  CHECK_THROWS_AS(step_inverse(FineState{100}, d), DomainError);
}

TEST_CASE("reversibility: exhaustive inverse composition at N=65536") {
  const auto d =
      make_dynamics(DynamicsKind::generated, 99, ChannelSpace{1u << 16});
  for (std::uint32_t s = 0; s < d.size(); ++s) {
    CHECK(step_inverse(step(FineState{s}, d), d).index == s);
  }
}

TEST_CASE("bijectivity: forward table is a permutation") {
  SUBCASE("exhaustive at N=4096") {
    const auto d =
        make_dynamics(DynamicsKind::generated, 5, ChannelSpace{4096});
    std::vector<bool> hit(d.size(), false);
    for (std::uint32_t s = 0; s < d.size(); ++s) {
      const auto t = step(FineState{s}, d).index;
      CHECK_FALSE(hit[t]);
      hit[t] = true;
    }
  }
  SUBCASE("sampled collision-free at N=2^20") {
    const auto d =
        make_dynamics(DynamicsKind::generated, 5, ChannelSpace{1u << 20});
    SeededRng rng(123);
    std::unordered_set<std::uint32_t> inputs;
    std::unordered_set<std::uint32_t> outputs;
    for (int i = 0; i < 100000; ++i) {
      const auto s = static_cast<std::uint32_t>(rng.below(d.size()));
      if (!inputs.insert(s).second) continue;
      CHECK(outputs.insert(step(FineState{s}, d).index).second);
    }
  }
}

TEST_CASE("make_dynamics: block-diagonal maps each block to itself") {
  const Partition blocks = {{0, 1, 2, 3, 4, 5, 6, 7},
                            {8, 9, 10, 11, 12, 13, 14, 15}};
  const auto d =
      make_dynamics(DynamicsKind::block_diagonal, 17, ChannelSpace{16}, blocks);
  for (std::uint32_t s = 0; s < 8; ++s) {
    CHECK(step(FineState{s}, d).index < 8);
  }
  for (std::uint32_t s = 8; s < 16; ++s) {
    CHECK(step(FineState{s}, d).index >= 8);
  }
}

TEST_CASE("make_dynamics: coupled leaks the designated block") {
  const Partition blocks = {{0, 1, 2, 3, 4, 5, 6, 7},
                            {8, 9, 10, 11, 12, 13, 14, 15}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d =
        make_dynamics(DynamicsKind::coupled, seed, ChannelSpace{16}, blocks);
    bool leaks = false;
    for (std::uint32_t s = 0; s < 8; ++s) {
      leaks = leaks || step(FineState{s}, d).index >= 8;
    }
    CHECK(leaks);
  }
}

TEST_CASE("make_dynamics: bad partitions are rejected") {
  CHECK_THROWS_AS(make_dynamics(DynamicsKind::block_diagonal, 0,
                                ChannelSpace{8}, {{0, 1}, {1, 2, 3}}),
                  ConfigError);
  CHECK_THROWS_AS(make_dynamics(DynamicsKind::block_diagonal, 0,
                                ChannelSpace{8}, {{0, 1, 2}}),
                  ConfigError);
  CHECK_THROWS_AS(
      make_dynamics(DynamicsKind::coupled, 0, ChannelSpace{8},
                    {{0, 1, 2, 3, 4, 5, 6, 7}}),
      ConfigError);
  CHECK_THROWS_AS(make_dynamics(DynamicsKind::identity, 0, ChannelSpace{1}),
                  ConfigError);
}

TEST_CASE("determinism: identical seeds give identical trajectories") {
  const auto a = make_dynamics(DynamicsKind::generated, 7, ChannelSpace{512});
  const auto b = make_dynamics(DynamicsKind::generated, 7, ChannelSpace{512});
  FineState x{31};
  FineState y{31};
  for (int i = 0; i < 200; ++i) {
    x = step(x, a);
    y = step(y, b);
    CHECK(x == y);
  }
}

TEST_CASE("step_n composes forward steps") {
  const auto d = make_dynamics(DynamicsKind::generated, 3, ChannelSpace{64});
  FineState s{9};
  CHECK(step_n(s, d, 0) == s);
  FineState manual = s;
  for (int i = 0; i < 5; ++i) manual = step(manual, d);
  CHECK(step_n(s, d, 5) == manual);
}

TEST_CASE("decompositional equivalence holds for table dynamics") {
  const auto d = make_dynamics(DynamicsKind::generated, 21, ChannelSpace{1024});
  SeededRng rng(4);
  std::vector<FineState> from;
  for (int i = 0; i < 100; ++i) {
    from.push_back(FineState{static_cast<std::uint32_t>(rng.below(1024))});
  }
  CHECK(check_decompositional_equivalence(d, from, 50));

  const auto id = make_dynamics(DynamicsKind::identity, 0, ChannelSpace{1024});
  CHECK(check_decompositional_equivalence(id, from, 10));
}

TEST_CASE("decompositional equivalence: label-reading dynamics is caught") {
  // Negative control: a stepper that bends its trajectory using the coarse
  // label attached to the current state.
  const auto d = make_dynamics(DynamicsKind::generated, 21, ChannelSpace{256});
  const LabeledStepFn broken = [&d](FineState s,
                                    std::span<const std::uint32_t> labels) {
    const std::uint32_t bias = labels[s.index] % 7;
    return FineState{(step(s, d).index + bias) % 256};
  };
  const std::vector<FineState> from = {FineState{3}, FineState{77},
                                       FineState{200}};
  CHECK_FALSE(check_decompositional_equivalence(broken, ChannelSpace{256}, from,
                                                20, 0x5eed));
}

TEST_CASE("permutation dump round-trips through load") {
  const auto d = make_dynamics(DynamicsKind::generated, 13, ChannelSpace{128});
  std::stringstream buffer;
  dump_permutation(d, buffer);

  const auto loaded = load_permutation(buffer);
  CHECK(loaded.table() == d.table());
  CHECK(loaded.kind() == DynamicsKind::loaded);
}

TEST_CASE("load_permutation rejects malformed tables") {
  {
    std::stringstream bad("0 1\n1 1\n");  // not a bijection
    CHECK_THROWS_AS(load_permutation(bad), FixtureError);
  }
  {
    std::stringstream bad("0 0\n0 1\n");  // repeats a source state
    CHECK_THROWS_AS(load_permutation(bad), FixtureError);
  }
  {
    std::stringstream bad("garbage\n");
    CHECK_THROWS_AS(load_permutation(bad), FixtureError);
  }
  {
    std::stringstream bad("");
    CHECK_THROWS_AS(load_permutation(bad), FixtureError);
  }
}

TEST_CASE("from_table rejects non-bijections") {
  CHECK_THROWS_AS(ReversibleDynamics::from_table({0, 0}), FixtureError);
  CHECK_THROWS_AS(ReversibleDynamics::from_table({0, 5}), FixtureError);
}
