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

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "minobs/errors.hpp"

namespace minobs {

/// One fine-grained configuration of the channel: an index into [0, N).
struct FineState {
  std::uint32_t index = 0;
  friend constexpr auto operator<=>(FineState, FineState) = default;
};

/// The finite fine-grained state space of the channel. N >= 2.
struct ChannelSpace {
  std::uint32_t size = 0;
};

/// How a dynamics instance was constructed.
enum class DynamicsKind {
  identity,
  generated,       // seeded Fisher-Yates permutation over the whole space
  block_diagonal,  // permutes each block of a partition onto itself
  coupled,         // guaranteed to map some state of the first block outside it
  loaded,          // read back from a permutation table dump
};

std::string_view to_string(DynamicsKind kind);

/// A partition of [0, N) into disjoint, covering blocks.
using Partition = std::vector<std::vector<std::uint32_t>>;

/// An invertible map on fine states. Immutable after construction and safe to
/// share across threads; stepping is pure.
class ReversibleDynamics {
 public:
  /// Builds from an explicit forward table; throws FixtureError if the table
  /// is not a bijection on [0, table.size()).
  static ReversibleDynamics from_table(std::vector<std::uint32_t> forward,
                                       DynamicsKind kind = DynamicsKind::loaded,
                                       std::uint64_t seed = 0);

  FineState forward(FineState s) const {
    check_range(s);
    return FineState{forward_[s.index]};
  }
  FineState inverse(FineState s) const {
    check_range(s);
    return FineState{inverse_[s.index]};
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(forward_.size()); }
  DynamicsKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint32_t>& table() const { return forward_; }

 private:
  ReversibleDynamics() = default;
  void check_range(FineState s) const {
    if (s.index >= forward_.size()) {
      throw DomainError("fine state index " + std::to_string(s.index) +
                        " outside channel space of size " +
                        std::to_string(forward_.size()));
    }
  }

  std::vector<std::uint32_t> forward_;
  std::vector<std::uint32_t> inverse_;
  DynamicsKind kind_ = DynamicsKind::identity;
  std::uint64_t seed_ = 0;
};

/// One deterministic forward step. Pure; consumes only the fine state.
inline FineState step(FineState s, const ReversibleDynamics& d) {
  return d.forward(s);
}

/// The inverse step: step_inverse(step(s)) == s for all s.
inline FineState step_inverse(FineState s, const ReversibleDynamics& d) {
  return d.inverse(s);
}

/// step applied n times (n may be 0).
FineState step_n(FineState s, const ReversibleDynamics& d, std::uint32_t n);

/// Constructs a dynamics instance. `blocks` is required for block_diagonal
/// and coupled and must partition [0, N); for coupled, blocks[0] is the
/// designated block that is guaranteed to leak.
ReversibleDynamics make_dynamics(DynamicsKind kind, std::uint64_t seed,
                                 ChannelSpace space,
                                 const Partition& blocks = {});

/// Convenience: partition [0, N) into `count` equal contiguous blocks.
Partition equal_blocks(ChannelSpace space, std::uint32_t count);

/// Stepping hook that is shown per-state coarse labels alongside the fine
/// state. Production dynamics must ignore the labels; the hook exists so the
/// equivalence check below can catch a dynamics that does not.
using LabeledStepFn =
    std::function<FineState(FineState, std::span<const std::uint32_t>)>;

/// Recomputes the trajectory of every listed state over the horizon under two
/// independently seeded relabelings of a coarse partition and reports whether
/// all trajectories are bit-identical.
bool check_decompositional_equivalence(const LabeledStepFn& stepper,
                                       ChannelSpace space,
                                       std::span<const FineState> from,
                                       std::uint32_t horizon,
                                       std::uint64_t relabel_seed);

/// Same check for a ReversibleDynamics (true by construction; guards against
/// regressions where observer data leaks into stepping).
bool check_decompositional_equivalence(const ReversibleDynamics& d,
                                       std::span<const FineState> from,
                                       std::uint32_t horizon,
                                       std::uint64_t relabel_seed = 0x5eed);

/// Audit dump: one "s forward(s)" pair per line.
void dump_permutation(const ReversibleDynamics& d, std::ostream& out);

/// Reads a table written by dump_permutation. Throws FixtureError on a
/// malformed or non-bijective table.
ReversibleDynamics load_permutation(std::istream& in);

}  // namespace minobs
