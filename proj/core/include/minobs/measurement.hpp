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

#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "minobs/channel.hpp"
#include "minobs/povm.hpp"

namespace minobs {

enum class ReactionMode { canonical, reseed, custom };

std::string_view to_string(ReactionMode mode);

/// The information a measurement deposits back into the channel. Every mode
/// keeps the post-reaction state inside the measured component's inverse
/// image, so the recorded value stays true at the instant of recording.
class ReactionMap {
 public:
  /// Deterministic representative: the minimum-index member of the image.
  static ReactionMap canonical();

  /// Pseudorandom member of the image, drawn from (seed, salt). The salt is
  /// the caller's tick or trial tag; identical (seed, salt) replays exactly.
  static ReactionMap reseed(std::uint64_t seed);

  using Transform = std::function<FineState(FineState, const Povm&,
                                            std::size_t component,
                                            std::uint64_t salt)>;
  static ReactionMap custom(Transform fn);

  ReactionMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }

  /// Post-measurement state for outcome component k on pre-state s.
  FineState transform(FineState s, const Povm& p, std::size_t component,
                      std::uint64_t salt) const;

 private:
  ReactionMode mode_ = ReactionMode::canonical;
  std::uint64_t seed_ = 0;
  Transform custom_;
};

struct MeasureResult {
  std::optional<double> outcome;  // nullopt = NULL
  std::size_t component = 0;      // 0 = NULL
  FineState state;                // post-measurement channel state
};

/// Applies p to s and deposits the reaction. A NULL outcome never changes the
/// channel state. Throws InvariantError if a custom reaction leaves the
/// measured image.
MeasureResult measure(FineState s, const Povm& p, const ReactionMap& r,
                      std::uint64_t salt = 0);

/// Outcome-pair frequencies for the two measurement orders, plus their total
/// variation distance. Evidence container for (non-)commutativity.
struct OrderStats {
  struct Pair {
    std::optional<double> a;  // outcome of the A observable (nullopt = NULL)
    std::optional<double> b;
    double p_ab = 0.0;  // frequency when A is measured first
    double p_ba = 0.0;  // frequency when B is measured first
  };
  std::vector<Pair> pairs;  // sorted by (a, b)
  double tv_distance = 0.0;
  std::uint64_t samples = 0;
  bool exhaustive = false;
};

struct SamplingSpec {
  bool exhaustive = true;
  std::uint64_t trials = 0;  // used when exhaustive is false
  std::uint64_t seed = 0;
};

/// For each initial state: measure A, step once, measure B; then rerun the
/// reversed order from the same initial state. Exhaustive over all N states
/// when requested (N <= 2^14 is the intended regime), seeded sampling above.
OrderStats commutator_test(const Povm& a, const Povm& b,
                           const ReversibleDynamics& d, const ReactionMap& r,
                           const SamplingSpec& sampling);

nlohmann::json order_stats_to_json(const OrderStats& stats);

/// Fig. 5/6 membership data for a state in the intersection of two inverse
/// images: where the intersection membership goes one step backward, one step
/// forward untouched, and one step forward after a measurement of (a, ka).
struct CounterfactualReport {
  bool in_intersection_before = false;    // step_inverse(s)
  bool in_intersection_after_free = false;    // step(s)
  bool in_intersection_after_measured = false;  // step(measure(s).state)
};

/// Precondition: s lies in Im^-1(a_ka) ∩ Im^-1(b_kb); DomainError otherwise.
CounterfactualReport counterfactual_check(FineState s, const Povm& a,
                                          std::size_t ka, const Povm& b,
                                          std::size_t kb,
                                          const ReversibleDynamics& d,
                                          const ReactionMap& r);

/// {s in img1 : step^delta(s) in img2}, computed exactly. An empty result
/// certifies the two coarse states as separable across that interval.
std::vector<FineState> separability_overlap(const InverseImage& img1,
                                            const InverseImage& img2,
                                            const ReversibleDynamics& d,
                                            std::uint32_t delta);

}  // namespace minobs
