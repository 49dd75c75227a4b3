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

#include "minobs/channel.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "minobs/rng.hpp"

namespace minobs {

namespace {

constexpr std::uint32_t kMaxSpace = 1u << 24;

void validate_space(ChannelSpace space) {
  if (space.size < 2) {
    throw ConfigError("channel space must have N >= 2, got " +
                      std::to_string(space.size));
  }
  if (space.size > kMaxSpace) {
    throw ConfigError("channel space of size " + std::to_string(space.size) +
                      " exceeds the table-backed ceiling of 2^24");
  }
}

void validate_partition(const Partition& blocks, std::uint32_t n) {
  std::vector<bool> seen(n, false);
  std::size_t covered = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw ConfigError("partition contains an empty block");
    for (std::uint32_t s : block) {
      if (s >= n) {
        throw ConfigError("partition state " + std::to_string(s) +
                          " outside [0, " + std::to_string(n) + ")");
      }
      if (seen[s]) {
        throw ConfigError("partition repeats state " + std::to_string(s));
      }
      seen[s] = true;
      ++covered;
    }
  }
  if (covered != n) {
    throw ConfigError("partition covers " + std::to_string(covered) +
                      " of " + std::to_string(n) + " states");
  }
}

std::vector<std::uint32_t> invert_table(const std::vector<std::uint32_t>& fwd) {
  std::vector<std::uint32_t> inv(fwd.size(), 0);
  std::vector<bool> hit(fwd.size(), false);
  for (std::uint32_t s = 0; s < fwd.size(); ++s) {
    const std::uint32_t t = fwd[s];
    if (t >= fwd.size() || hit[t]) {
      throw FixtureError("forward table is not a bijection at index " +
                         std::to_string(s));
    }
    hit[t] = true;
    inv[t] = s;
  }
  return inv;
}

}  // namespace

std::string_view to_string(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::identity: return "identity";
    case DynamicsKind::generated: return "generated";
    case DynamicsKind::block_diagonal: return "block-diagonal";
    case DynamicsKind::coupled: return "coupled";
    case DynamicsKind::loaded: return "loaded";
  }
  return "unknown";
}

ReversibleDynamics ReversibleDynamics::from_table(
    std::vector<std::uint32_t> forward, DynamicsKind kind, std::uint64_t seed) {
  ReversibleDynamics d;
  d.inverse_ = invert_table(forward);
  d.forward_ = std::move(forward);
  d.kind_ = kind;
  d.seed_ = seed;
  return d;
}

FineState step_n(FineState s, const ReversibleDynamics& d, std::uint32_t n) {
  for (std::uint32_t i = 0; i < n; ++i) s = d.forward(s);
  return s;
}

ReversibleDynamics make_dynamics(DynamicsKind kind, std::uint64_t seed,
                                 ChannelSpace space, const Partition& blocks) {
  validate_space(space);
  const std::uint32_t n = space.size;

  switch (kind) {
    case DynamicsKind::identity: {
      std::vector<std::uint32_t> fwd(n);
      for (std::uint32_t s = 0; s < n; ++s) fwd[s] = s;
      return ReversibleDynamics::from_table(std::move(fwd), kind, seed);
    }
    case DynamicsKind::generated: {
      return ReversibleDynamics::from_table(random_permutation(n, seed), kind,
                                            seed);
    }
    case DynamicsKind::block_diagonal: {
      validate_partition(blocks, n);
      std::vector<std::uint32_t> fwd(n);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& block = blocks[b];
        const auto m = static_cast<std::uint32_t>(block.size());
        // Each block is shuffled onto itself with its own derived stream.
        const auto perm = random_permutation(m, stream_seed(seed, b));
        for (std::uint32_t i = 0; i < m; ++i) fwd[block[i]] = block[perm[i]];
      }
      return ReversibleDynamics::from_table(std::move(fwd), kind, seed);
    }
    case DynamicsKind::coupled: {
      validate_partition(blocks, n);
      if (blocks.size() < 2) {
        throw ConfigError("coupled dynamics needs at least two blocks");
      }
      std::vector<std::uint32_t> fwd = random_permutation(n, seed);
      const auto& designated = blocks[0];
      std::vector<bool> inside(n, false);
      for (std::uint32_t s : designated) inside[s] = true;
      const bool leaks = std::any_of(
          designated.begin(), designated.end(),
          [&](std::uint32_t s) { return !inside[fwd[s]]; });
      if (!leaks) {
        // Swap one image with an out-of-block state's image to force a leak.
        std::uint32_t outside = 0;
        while (inside[outside]) ++outside;
        std::swap(fwd[designated[0]], fwd[outside]);
      }
      return ReversibleDynamics::from_table(std::move(fwd), kind, seed);
    }
    case DynamicsKind::loaded:
      throw ConfigError("loaded dynamics come from load_permutation()");
  }
  throw ConfigError("unknown dynamics kind");
}

Partition equal_blocks(ChannelSpace space, std::uint32_t count) {
  validate_space(space);
  if (count == 0 || space.size % count != 0) {
    throw ConfigError("cannot split " + std::to_string(space.size) +
                      " states into " + std::to_string(count) +
                      " equal blocks");
  }
  const std::uint32_t width = space.size / count;
  Partition blocks(count);
  for (std::uint32_t b = 0; b < count; ++b) {
    blocks[b].resize(width);
    for (std::uint32_t i = 0; i < width; ++i) blocks[b][i] = b * width + i;
  }
  return blocks;
}

bool check_decompositional_equivalence(const LabeledStepFn& stepper,
                                       ChannelSpace space,
                                       std::span<const FineState> from,
                                       std::uint32_t horizon,
                                       std::uint64_t relabel_seed) {
  validate_space(space);
  // Two independently seeded labelings stand in for "any" partition choice:
  // the trajectory must not notice which one is attached.
  auto make_labels = [&](std::uint64_t s) {
    SeededRng rng(s);
    std::vector<std::uint32_t> labels(space.size);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(16));
    return labels;
  };
  const auto labels_a = make_labels(stream_seed(relabel_seed, 0));
  const auto labels_b = make_labels(stream_seed(relabel_seed, 1));

  for (FineState start : from) {
    FineState a = start;
    FineState b = start;
    for (std::uint32_t t = 0; t < horizon; ++t) {
      a = stepper(a, labels_a);
      b = stepper(b, labels_b);
      if (a != b) return false;
    }
  }
  return true;
}

bool check_decompositional_equivalence(const ReversibleDynamics& d,
                                       std::span<const FineState> from,
                                       std::uint32_t horizon,
                                       std::uint64_t relabel_seed) {
  const LabeledStepFn stepper =
      [&d](FineState s, std::span<const std::uint32_t>) { return step(s, d); };
  return check_decompositional_equivalence(stepper, ChannelSpace{d.size()},
                                           from, horizon, relabel_seed);
}

void dump_permutation(const ReversibleDynamics& d, std::ostream& out) {
  for (std::uint32_t s = 0; s < d.size(); ++s) {
    out << s << ' ' << d.table()[s] << '\n';
  }
  if (!out) throw IoError("failed writing permutation dump");
}

ReversibleDynamics load_permutation(std::istream& in) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint32_t s = 0;
    std::uint32_t t = 0;
    if (!(row >> s >> t)) {
      throw FixtureError("malformed permutation line: " + line);
    }
    pairs.emplace_back(s, t);
  }
  if (pairs.empty()) throw FixtureError("empty permutation table");

  std::vector<std::uint32_t> fwd(pairs.size(), 0);
  std::vector<bool> assigned(pairs.size(), false);
  for (auto [s, t] : pairs) {
    if (s >= fwd.size() || assigned[s]) {
      throw FixtureError("permutation table does not enumerate [0, N) once");
    }
    assigned[s] = true;
    fwd[s] = t;
  }
  return ReversibleDynamics::from_table(std::move(fwd), DynamicsKind::loaded);
}

}  // namespace minobs
