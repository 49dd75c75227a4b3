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

#include "minobs/povm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minobs {

namespace {

std::vector<std::uint32_t> sorted_union(
    const std::vector<std::vector<std::uint32_t>>& sets) {
  std::vector<std::uint32_t> out;
  for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_subset(const std::vector<std::uint32_t>& a,
               const std::vector<std::uint32_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

PovmComponent PovmComponent::from_table(double value,
                                        std::vector<double> weights) {
  PovmComponent c;
  c.value_ = value;
  c.weight_ = std::move(weights);
  return c;
}

PovmComponent PovmComponent::from_support(double value,
                                          std::vector<std::uint32_t> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  PovmComponent c;
  c.value_ = value;
  c.weight_ = std::move(support);
  return c;
}

Povm::Povm(ChannelSpace space, double epsilon,
           std::vector<PovmComponent> components)
    : space_(space), epsilon_(epsilon), components_(std::move(components)) {
  if (space_.size < 2) {
    throw ConfigError("POVM channel space must have N >= 2");
  }
  if (!(epsilon_ > 0.0) || epsilon_ > 1.0) {
    throw FixtureError("epsilon must lie in (0, 1], got " +
                       std::to_string(epsilon_));
  }
  if (components_.empty()) {
    throw FixtureError("POVM needs at least the NULL component");
  }
  if (components_[0].value() != 0.0) {
    throw FixtureError("component 0 is the NULL slot and must carry value 0");
  }
  for (const auto& c : components_) {
    if (!std::isfinite(c.value())) {
      throw FixtureError("POVM component value must be finite");
    }
  }

  // One exhaustive scan fixes every detectable support; weights outside
  // [0, 1] are rejected here, naming the state.
  supports_.resize(components_.size());
  for (std::uint32_t s = 0; s < space_.size; ++s) {
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const double w = components_[k].weight(FineState{s});
      if (w < 0.0 || w > 1.0) {
        throw FixtureError("weight outside [0,1] at state " +
                           std::to_string(s) + " component " +
                           std::to_string(k));
      }
      if (w >= epsilon_) supports_[k].push_back(s);
    }
  }
}

const PovmComponent& Povm::component(std::size_t k) const {
  if (k >= components_.size()) {
    throw DomainError("component index " + std::to_string(k) +
                      " out of range");
  }
  return components_[k];
}

const std::vector<std::uint32_t>& Povm::support(std::size_t k) const {
  if (k >= supports_.size()) {
    throw DomainError("component index " + std::to_string(k) +
                      " out of range");
  }
  return supports_[k];
}

InverseImage inverse_image(const Povm& p, std::size_t k) {
  return InverseImage{k, p.component(k).value(), p.support(k)};
}

std::vector<std::uint32_t> union_image(const Povm& p) {
  std::vector<std::vector<std::uint32_t>> sets;
  for (std::size_t k = 1; k < p.component_count(); ++k) {
    sets.push_back(p.support(k));
  }
  return sorted_union(sets);
}

std::size_t apply_component(const Povm& p, FineState s) {
  if (s.index >= p.space().size) {
    throw DomainError("state " + std::to_string(s.index) +
                      " outside the POVM's channel space");
  }
  std::size_t hit = 0;
  for (std::size_t k = 1; k < p.component_count(); ++k) {
    if (p.component(k).weight(s) >= p.epsilon()) {
      if (hit != 0) {
        throw OrthogonalityError(
            "state " + std::to_string(s.index) +
            " detected by components " + std::to_string(hit) + " and " +
            std::to_string(k) + "; observable is malformed for this regime");
      }
      hit = k;
    }
  }
  return hit;
}

std::optional<double> apply(const Povm& p, FineState s) {
  const std::size_t k = apply_component(p, s);
  if (k == 0) return std::nullopt;
  return p.component(k).value();
}

bool check_orthogonality(const Povm& p) {
  // Pairwise disjointness over all components including NULL vs non-NULL.
  const std::uint32_t n = p.space().size;
  std::vector<std::uint8_t> owner(n, 0);
  for (std::size_t k = 0; k < p.component_count(); ++k) {
    for (std::uint32_t s : p.support(k)) {
      if (owner[s]) return false;
      owner[s] = 1;
    }
  }
  return true;
}

std::vector<std::string> completeness_diagnostics(const Povm& p, double tol,
                                                  std::size_t max_reports) {
  std::vector<std::string> out;
  for (std::uint32_t s = 0; s < p.space().size && out.size() < max_reports;
       ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.component_count(); ++k) {
      sum += p.component(k).weight(FineState{s});
    }
    if (std::abs(sum - 1.0) > tol) {
      out.push_back("completeness violated at state " + std::to_string(s) +
                    ": weights sum to " + std::to_string(sum));
    }
  }
  return out;
}

std::vector<std::string> value_diagnostics(const Povm& p) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k < p.component_count(); ++k) {
    const double v = p.component(k).value();
    if (v == 0.0) {
      out.push_back("component " + std::to_string(k) +
                    " carries value 0, which is reserved for NULL");
    }
    for (std::size_t j = k + 1; j < p.component_count(); ++j) {
      if (v == p.component(j).value()) {
        out.push_back("components " + std::to_string(k) + " and " +
                      std::to_string(j) + " collide on value " +
                      std::to_string(v));
      }
    }
  }
  return out;
}

bool check_triple(const PovmTriple& t) { return triple_diagnostics(t).empty(); }

std::vector<std::string> triple_diagnostics(const PovmTriple& t) {
  std::vector<std::string> out;

  auto require_nonempty = [&out](const Povm& p, const std::string& name) {
    for (std::size_t k = 1; k < p.component_count(); ++k) {
      if (p.support(k).empty()) {
        out.push_back(name + " component " + std::to_string(k) +
                      " has an empty inverse image");
      }
    }
  };
  require_nonempty(t.identify, "identify");
  require_nonempty(t.select, "select");
  for (std::size_t j = 0; j < t.observables.size(); ++j) {
    require_nonempty(t.observables[j],
                     "observable " + std::to_string(j + 1));
  }

  const auto s_img = union_image(t.identify);
  if (s_img.empty()) out.push_back("identify union image is empty");
  if (s_img.size() >= t.identify.space().size) {
    out.push_back("identify union image is not a proper subset of the space");
  }

  auto require_proper = [&](const Povm& p, const std::string& name) {
    const auto img = union_image(p);
    if (!is_subset(img, s_img)) {
      out.push_back(name + " image not contained in the identify image");
    } else if (img.size() == s_img.size()) {
      out.push_back(name + " image equals the identify image (not proper)");
    }
  };
  require_proper(t.select, "select");
  for (std::size_t j = 0; j < t.observables.size(); ++j) {
    require_proper(t.observables[j], "observable " + std::to_string(j + 1));
  }

  if (t.select.component_count() != t.observables.size() + 1) {
    out.push_back("selector has " +
                  std::to_string(t.select.component_count() - 1) +
                  " slots for " + std::to_string(t.observables.size()) +
                  " observables");
  }

  for (const auto& p : {std::cref(t.identify), std::cref(t.select)}) {
    auto v = value_diagnostics(p.get());
    out.insert(out.end(), v.begin(), v.end());
  }
  for (const auto& obs : t.observables) {
    auto v = value_diagnostics(obs);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// --- JSON -------------------------------------------------------------------

namespace {

std::vector<std::uint32_t> resolve_predicate(const nlohmann::json& pred,
                                             std::uint32_t n) {
  const std::string name = pred.at("name").get<std::string>();
  std::vector<std::uint32_t> support;
  if (name == "range") {
    const auto lo = pred.at("lo").get<std::uint32_t>();
    const auto hi = pred.at("hi").get<std::uint32_t>();
    if (lo > hi || hi > n) {
      throw FixtureError("range predicate [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + ") outside [0, " +
                         std::to_string(n) + ")");
    }
    for (std::uint32_t s = lo; s < hi; ++s) support.push_back(s);
  } else if (name == "modulo") {
    const auto mod = pred.at("mod").get<std::uint32_t>();
    const auto rem = pred.at("rem").get<std::uint32_t>();
    if (mod == 0 || rem >= mod) {
      throw FixtureError("modulo predicate needs 0 <= rem < mod");
    }
    for (std::uint32_t s = rem; s < n; s += mod) support.push_back(s);
  } else {
    throw FixtureError("unknown predicate '" + name + "'");
  }
  return support;
}

}  // namespace

Povm povm_from_json(const nlohmann::json& doc) {
  const auto n = doc.at("space").get<std::uint32_t>();
  const auto epsilon = doc.at("epsilon").get<double>();
  const auto& comps = doc.at("components");
  if (!comps.is_array() || comps.empty()) {
    throw FixtureError("POVM document needs a non-empty components array");
  }

  std::vector<PovmComponent> components(comps.size());
  std::vector<bool> claimed(n, false);
  std::optional<std::size_t> complement_slot;

  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& cj = comps[k];
    const double value = cj.at("value").get<double>();
    std::vector<std::uint32_t> support;
    if (cj.contains("support")) {
      support = cj.at("support").get<std::vector<std::uint32_t>>();
      for (std::uint32_t s : support) {
        if (s >= n) {
          throw FixtureError("support state " + std::to_string(s) +
                             " outside [0, " + std::to_string(n) + ")");
        }
      }
    } else if (cj.contains("predicate")) {
      const auto& pred = cj.at("predicate");
      if (pred.at("name").get<std::string>() == "complement") {
        if (complement_slot) {
          throw FixtureError("at most one complement component is allowed");
        }
        complement_slot = k;
        components[k] = PovmComponent::from_support(value, {});
        components[k].set_descriptor(cj);
        continue;
      }
      support = resolve_predicate(pred, n);
    } else {
      throw FixtureError("component needs either 'support' or 'predicate'");
    }
    for (std::uint32_t s : support) {
      if (s < n) claimed[s] = claimed[s] || true;
    }
    components[k] = PovmComponent::from_support(value, std::move(support));
    components[k].set_descriptor(cj);
  }

  if (complement_slot) {
    // Everything no explicit component claimed.
    std::vector<std::uint32_t> rest;
    std::vector<bool> taken(n, false);
    for (std::size_t k = 0; k < components.size(); ++k) {
      if (k == *complement_slot) continue;
      for (std::uint32_t s = 0; s < n; ++s) {
        if (components[k].weight(FineState{s}) >= epsilon) taken[s] = true;
      }
    }
    for (std::uint32_t s = 0; s < n; ++s) {
      if (!taken[s]) rest.push_back(s);
    }
    const double value = components[*complement_slot].value();
    auto descriptor = components[*complement_slot].descriptor();
    components[*complement_slot] =
        PovmComponent::from_support(value, std::move(rest));
    components[*complement_slot].set_descriptor(std::move(descriptor));
  }

  return Povm(ChannelSpace{n}, epsilon, std::move(components));
}

nlohmann::json povm_to_json(const Povm& p) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t k = 0; k < p.component_count(); ++k) {
    const auto& c = p.component(k);
    if (!c.descriptor().is_null() && !c.descriptor().empty()) {
      comps.push_back(c.descriptor());
    } else {
      // Programmatic components serialize as their detectable support.
      comps.push_back({{"value", c.value()}, {"support", p.support(k)}});
    }
  }
  return {{"space", p.space().size},
          {"epsilon", p.epsilon()},
          {"components", comps}};
}

PovmTriple triple_from_json(const nlohmann::json& doc) {
  PovmTriple t{doc.at("system").get<int>(),
               povm_from_json(doc.at("identify")),
               povm_from_json(doc.at("select")),
               {},
               {}};
  for (const auto& obs : doc.at("observables")) {
    t.observables.push_back(povm_from_json(obs));
  }
  for (const auto& v : doc.at("accept")) {
    t.accept.insert(v.get<double>());
  }
  return t;
}

nlohmann::json triple_to_json(const PovmTriple& t) {
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : t.observables) obs.push_back(povm_to_json(o));
  return {{"system", t.system_id},
          {"identify", povm_to_json(t.identify)},
          {"select", povm_to_json(t.select)},
          {"observables", obs},
          {"accept", std::vector<double>(t.accept.begin(), t.accept.end())}};
}

}  // namespace minobs
