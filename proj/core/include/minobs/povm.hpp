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

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "minobs/channel.hpp"
#include "minobs/errors.hpp"

namespace minobs {

/// One coarse observable component: a recordable outcome value plus a weight
/// in [0,1] per fine state. Index 0 of the enclosing Povm is the NULL
/// component; its value is fixed at 0 and is never recorded.
class PovmComponent {
 public:
  /// Dense per-state weights (N <= 2^16 regime).
  static PovmComponent from_table(double value, std::vector<double> weights);

  /// Indicator weight: 1 on `support`, 0 elsewhere. Support is sorted and
  /// deduplicated.
  static PovmComponent from_support(double value,
                                    std::vector<std::uint32_t> support);

  double value() const { return value_; }

  double weight(FineState s) const {
    if (const auto* table = std::get_if<std::vector<double>>(&weight_)) {
      return s.index < table->size() ? (*table)[s.index] : 0.0;
    }
    const auto& support = std::get<std::vector<std::uint32_t>>(weight_);
    return std::binary_search(support.begin(), support.end(), s.index) ? 1.0
                                                                       : 0.0;
  }

  /// The fixture form this component was declared with, kept verbatim so
  /// serialization round-trips bit-exactly. Empty for programmatic components.
  const nlohmann::json& descriptor() const { return descriptor_; }
  void set_descriptor(nlohmann::json d) { descriptor_ = std::move(d); }

 private:
  double value_ = 0.0;
  std::variant<std::vector<double>, std::vector<std::uint32_t>> weight_;
  nlohmann::json descriptor_;
};

/// A complete coarse observable over the channel: ordered components with the
/// NULL component at index 0 and a detection threshold epsilon in (0, 1].
/// Immutable after construction; all operations on it are pure.
class Povm {
 public:
  Povm(ChannelSpace space, double epsilon,
       std::vector<PovmComponent> components);

  const ChannelSpace& space() const { return space_; }
  double epsilon() const { return epsilon_; }
  std::size_t component_count() const { return components_.size(); }
  const PovmComponent& component(std::size_t k) const;

  /// Detectable support of component k, precomputed by exhaustive scan at
  /// construction: {s : weight_k(s) >= epsilon}, ascending.
  const std::vector<std::uint32_t>& support(std::size_t k) const;

 private:
  ChannelSpace space_;
  double epsilon_ = 0.0;
  std::vector<PovmComponent> components_;
  std::vector<std::vector<std::uint32_t>> supports_;
};

/// The inverse image of one component value: the exact set of fine states the
/// component detects at the POVM's threshold.
struct InverseImage {
  std::size_t component = 0;
  double value = 0.0;
  std::vector<std::uint32_t> states;  // ascending

  bool contains(FineState s) const {
    return std::binary_search(states.begin(), states.end(), s.index);
  }
  std::size_t size() const { return states.size(); }
};

InverseImage inverse_image(const Povm& p, std::size_t k);

/// Union of all non-NULL inverse images, ascending. The paper-facing notion
/// of "the system this POVM identifies".
std::vector<std::uint32_t> union_image(const Povm& p);

/// Component index (0 = NULL) that detects s. Throws OrthogonalityError when
/// two or more non-NULL components are above threshold on s.
std::size_t apply_component(const Povm& p, FineState s);

/// Outcome value of the unique detecting component, or nullopt for NULL.
std::optional<double> apply(const Povm& p, FineState s);

/// True iff all non-NULL inverse images are pairwise disjoint and the NULL
/// image is disjoint from every one of them.
bool check_orthogonality(const Povm& p);

/// Per-state completeness check: sum of weights must be 1 within `tol` at
/// every state. Returns one diagnostic per offending state (capped).
std::vector<std::string> completeness_diagnostics(const Povm& p,
                                                  double tol = 1e-12,
                                                  std::size_t max_reports = 8);

/// Fixture-level value rules: non-NULL values must be finite, non-zero and
/// pairwise distinct (records store values, not indices).
std::vector<std::string> value_diagnostics(const Povm& p);

/// The per-system triple (S, P, {A_j}): identification, selector, and the
/// selectable observables, plus the identify outcomes accepted as "ready".
/// Selector component j (1-based) corresponds to observables[j-1].
struct PovmTriple {
  int system_id = 0;
  Povm identify;
  Povm select;
  std::vector<Povm> observables;
  std::set<double> accept;
};

/// Condition-1 check: every non-NULL component image non-empty, the identify
/// union a proper subset of the space, and the selector / observable unions
/// proper subsets of the identify union.
bool check_triple(const PovmTriple& t);

/// Same checks, reported individually for validation output.
std::vector<std::string> triple_diagnostics(const PovmTriple& t);

// --- fixture (de)serialization ---------------------------------------------
//
// Schema: {"space": N, "epsilon": e, "components": [
//            {"value": v, "support": [indices...]}
//          | {"value": v, "predicate": {"name": "range", "lo": a, "hi": b}}
//          | {"value": v, "predicate": {"name": "modulo", "mod": m, "rem": r}}
//          | {"value": v, "predicate": {"name": "complement"}}  ]}
// "complement" (at most one, conventionally the NULL slot) resolves to every
// state not claimed by any other component. Round-trips bit-exactly.

Povm povm_from_json(const nlohmann::json& doc);
nlohmann::json povm_to_json(const Povm& p);

PovmTriple triple_from_json(const nlohmann::json& doc);
nlohmann::json triple_to_json(const PovmTriple& t);

}  // namespace minobs
