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

#include "minobs/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "minobs/rng.hpp"

namespace minobs {

std::string_view to_string(ReactionMode mode) {
  switch (mode) {
    case ReactionMode::canonical: return "canonical";
    case ReactionMode::reseed: return "reseed";
    case ReactionMode::custom: return "custom";
  }
  return "unknown";
}

ReactionMap ReactionMap::canonical() {
  ReactionMap r;
  r.mode_ = ReactionMode::canonical;
  return r;
}

ReactionMap ReactionMap::reseed(std::uint64_t seed) {
  ReactionMap r;
  r.mode_ = ReactionMode::reseed;
  r.seed_ = seed;
  return r;
}

ReactionMap ReactionMap::custom(Transform fn) {
  ReactionMap r;
  r.mode_ = ReactionMode::custom;
  r.custom_ = std::move(fn);
  return r;
}

FineState ReactionMap::transform(FineState s, const Povm& p,
                                 std::size_t component,
                                 std::uint64_t salt) const {
  const auto& image = p.support(component);
  if (image.empty()) {
    throw InvariantError("reaction requested for a component with an empty "
                         "inverse image");
  }
  switch (mode_) {
    case ReactionMode::canonical:
      return FineState{image.front()};
    case ReactionMode::reseed: {
      SeededRng rng(stream_seed(seed_, salt));
      return FineState{image[rng.below(image.size())]};
    }
    case ReactionMode::custom: {
      const FineState post = custom_(s, p, component, salt);
      if (!std::binary_search(image.begin(), image.end(), post.index)) {
        throw InvariantError(
            "custom reaction moved state " + std::to_string(s.index) +
            " to " + std::to_string(post.index) +
            ", outside the measured inverse image");
      }
      return post;
    }
  }
  throw InvariantError("unknown reaction mode");
}

MeasureResult measure(FineState s, const Povm& p, const ReactionMap& r,
                      std::uint64_t salt) {
  const std::size_t k = apply_component(p, s);
  if (k == 0) return MeasureResult{std::nullopt, 0, s};
  const FineState post = r.transform(s, p, k, salt);
  return MeasureResult{p.component(k).value(), k, post};
}

namespace {

using PairKey = std::pair<std::optional<double>, std::optional<double>>;

PairKey run_order(FineState s, const Povm& first, const Povm& second,
                  bool a_first, const ReversibleDynamics& d,
                  const ReactionMap& r, std::uint64_t salt) {
  const MeasureResult m1 = measure(s, first, r, salt);
  const FineState mid = step(m1.state, d);
  const MeasureResult m2 = measure(mid, second, r, salt + 1);
  // Keys are always ordered (A outcome, B outcome) so the two order
  // distributions are comparable.
  return a_first ? PairKey{m1.outcome, m2.outcome}
                 : PairKey{m2.outcome, m1.outcome};
}

}  // namespace

OrderStats commutator_test(const Povm& a, const Povm& b,
                           const ReversibleDynamics& d, const ReactionMap& r,
                           const SamplingSpec& sampling) {
  std::map<PairKey, std::pair<std::uint64_t, std::uint64_t>> counts;
  std::uint64_t samples = 0;

  auto run_both = [&](FineState s, std::uint64_t salt) {
    counts[run_order(s, a, b, true, d, r, salt)].first += 1;
    counts[run_order(s, b, a, false, d, r, salt + 2)].second += 1;
    ++samples;
  };

  if (sampling.exhaustive) {
    for (std::uint32_t s = 0; s < d.size(); ++s) {
      run_both(FineState{s}, 4ull * s);
    }
  } else {
    if (sampling.trials == 0) {
      throw ConfigError("sampled commutator test needs trials >= 1");
    }
    SeededRng rng(sampling.seed);
    for (std::uint64_t t = 0; t < sampling.trials; ++t) {
      run_both(FineState{static_cast<std::uint32_t>(rng.below(d.size()))},
               4ull * t);
    }
  }

  OrderStats stats;
  stats.samples = samples;
  stats.exhaustive = sampling.exhaustive;
  const double denom = static_cast<double>(samples);
  double tv = 0.0;
  for (const auto& [key, c] : counts) {
    OrderStats::Pair pair;
    pair.a = key.first;
    pair.b = key.second;
    pair.p_ab = static_cast<double>(c.first) / denom;
    pair.p_ba = static_cast<double>(c.second) / denom;
    tv += std::abs(pair.p_ab - pair.p_ba);
    stats.pairs.push_back(pair);
  }
  stats.tv_distance = 0.5 * tv;
  return stats;
}

nlohmann::json order_stats_to_json(const OrderStats& stats) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : stats.pairs) {
    nlohmann::json row;
    row["a"] = p.a ? nlohmann::json(*p.a) : nlohmann::json(nullptr);
    row["b"] = p.b ? nlohmann::json(*p.b) : nlohmann::json(nullptr);
    row["p_ab"] = p.p_ab;
    row["p_ba"] = p.p_ba;
    pairs.push_back(row);
  }
  return {{"pairs", pairs},
          {"tv_distance", stats.tv_distance},
          {"samples", stats.samples},
          {"exhaustive", stats.exhaustive}};
}

CounterfactualReport counterfactual_check(FineState s, const Povm& a,
                                          std::size_t ka, const Povm& b,
                                          std::size_t kb,
                                          const ReversibleDynamics& d,
                                          const ReactionMap& r) {
  const InverseImage img_a = inverse_image(a, ka);
  const InverseImage img_b = inverse_image(b, kb);
  auto in_intersection = [&](FineState x) {
    return img_a.contains(x) && img_b.contains(x);
  };
  if (!in_intersection(s)) {
    throw DomainError("state " + std::to_string(s.index) +
                      " is not in the inverse-image intersection");
  }

  CounterfactualReport report;
  report.in_intersection_before = in_intersection(step_inverse(s, d));
  report.in_intersection_after_free = in_intersection(step(s, d));
  const MeasureResult m = measure(s, a, r, 0);
  report.in_intersection_after_measured = in_intersection(step(m.state, d));
  return report;
}

std::vector<FineState> separability_overlap(const InverseImage& img1,
                                            const InverseImage& img2,
                                            const ReversibleDynamics& d,
                                            std::uint32_t delta) {
  std::vector<FineState> overlap;
  for (std::uint32_t s : img1.states) {
    if (img2.contains(step_n(FineState{s}, d, delta))) {
      overlap.push_back(FineState{s});
    }
  }
  return overlap;
}

}  // namespace minobs
