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

#include "minobs/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "minobs/born.hpp"
#include "minobs/observer.hpp"
#include "minobs/rc_channel.hpp"
#include "minobs/rng.hpp"

namespace minobs {

namespace {

using nlohmann::json;

constexpr const char* kKnownExperiments[] = {
    "born", "commute", "counterfactual", "moore", "decohere", "bell-overlap"};

struct Outcome {
  json payload;
  bool passed = false;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// born
// ---------------------------------------------------------------------------

Outcome run_born(const json& config) {
  const Povm p = povm_from_json(config.at("povm"));
  const auto trials = config.at("trials").get<std::uint64_t>();
  const auto seed = config.at("seed").get<std::uint64_t>();
  const double sigma_bound =
      config.contains("expect")
          ? config.at("expect").value("sigma_bound", 3.0)
          : 3.0;

  const CountTable counts = state_counts(p);
  const FrequencyReport report = empirical_frequencies(p, trials, seed);

  // Exact normalization: sum of m_k / M as reduced fractions must be 1/1.
  Rational sum{0, 1};
  for (const Rational& r : born_probabilities_exact(counts)) sum = sum + r;
  const bool normalization_exact = sum == Rational{1, 1};

  bool within_bounds = true;
  json rows = json::array();
  for (const FrequencyRow& row : report.rows) {
    const double sigma =
        std::sqrt(row.p_theory * (1.0 - row.p_theory) /
                  static_cast<double>(trials));
    const double bound = sigma_bound * sigma;
    const bool ok = row.abs_error <= bound;
    within_bounds = within_bounds && ok;
    rows.push_back({{"component", row.component},
                    {"value", row.value},
                    {"m_k", row.count_m},
                    {"p_theory", row.p_theory},
                    {"p_empirical", row.p_empirical},
                    {"abs_error", row.abs_error},
                    {"bound", bound},
                    {"within_bound", ok}});
  }

  Outcome out;
  out.passed = within_bounds && normalization_exact;
  out.payload = {{"trials", trials},
                 {"rows", rows},
                 {"chi_square", report.chi_square},
                 {"max_abs_error", report.max_abs_error},
                 {"sigma_bound_factor", sigma_bound},
                 {"normalization_exact", normalization_exact},
                 {"pass", out.passed}};
  return out;
}

// ---------------------------------------------------------------------------
// commute
// ---------------------------------------------------------------------------

SamplingSpec parse_sampling(const json& config, std::uint64_t seed) {
  SamplingSpec spec;
  spec.seed = seed;
  if (config.contains("sampling")) {
    const json& s = config.at("sampling");
    spec.exhaustive = s.value("exhaustive", true);
    spec.trials = s.value("trials", std::uint64_t{0});
  }
  return spec;
}

Outcome run_commute(const json& config) {
  const ChannelSpace space = parse_space(config);
  const ReversibleDynamics d = parse_dynamics(config.at("dynamics"), space);
  const Povm a = povm_from_json(config.at("povm_a"));
  const Povm b = povm_from_json(config.at("povm_b"));
  const auto seed = config.at("seed").get<std::uint64_t>();
  const ReactionMap r =
      parse_reaction(config.value("reaction", json::object()), seed);

  const OrderStats stats =
      commutator_test(a, b, d, r, parse_sampling(config, seed));

  bool passed = true;
  json expect_echo = json::object();
  if (config.contains("expect")) {
    const json& expect = config.at("expect");
    expect_echo = expect;
    if (expect.contains("tv") && expect.at("tv") == "zero") {
      passed = passed && stats.tv_distance == 0.0;
    }
    if (expect.contains("tv_greater_than")) {
      passed =
          passed && stats.tv_distance > expect.at("tv_greater_than").get<double>();
    }
    if (expect.contains("tv_equals")) {
      const double want = expect.at("tv_equals").at("value").get<double>();
      const double tol = expect.at("tv_equals").value("tol", 1e-12);
      passed = passed && std::abs(stats.tv_distance - want) <= tol;
    }
  }

  Outcome out;
  out.passed = passed;
  out.payload = order_stats_to_json(stats);
  out.payload["expect"] = expect_echo;
  out.payload["pass"] = passed;
  return out;
}

// ---------------------------------------------------------------------------
// counterfactual
// ---------------------------------------------------------------------------

Outcome run_counterfactual(const json& config) {
  const ChannelSpace space = parse_space(config);
  const ReversibleDynamics d = parse_dynamics(config.at("dynamics"), space);
  const Povm a = povm_from_json(config.at("povm_a"));
  const Povm b = povm_from_json(config.at("povm_b"));
  const auto ka = config.at("component_a").get<std::size_t>();
  const auto kb = config.at("component_b").get<std::size_t>();
  const FineState s{config.at("state").get<std::uint32_t>()};
  const auto seed = config.at("seed").get<std::uint64_t>();
  const ReactionMap r =
      parse_reaction(config.value("reaction", json::object()), seed);

  const CounterfactualReport report = counterfactual_check(s, a, ka, b, kb, d, r);

  bool passed = true;
  if (config.contains("expect")) {
    const json& expect = config.at("expect");
    if (expect.contains("before")) {
      passed = passed && report.in_intersection_before ==
                             expect.at("before").get<bool>();
    }
    if (expect.contains("free")) {
      passed = passed &&
               report.in_intersection_after_free == expect.at("free").get<bool>();
    }
    if (expect.contains("measured")) {
      passed = passed && report.in_intersection_after_measured ==
                             expect.at("measured").get<bool>();
    }
  }

  Outcome out;
  out.passed = passed;
  out.payload = {{"in_intersection_before", report.in_intersection_before},
                 {"in_intersection_after_free", report.in_intersection_after_free},
                 {"in_intersection_after_measured",
                  report.in_intersection_after_measured},
                 {"pass", passed}};
  return out;
}

// ---------------------------------------------------------------------------
// moore
// ---------------------------------------------------------------------------

Outcome run_moore(const json& config) {
  const ChannelSpace space = parse_space(config);
  const ReversibleDynamics d = parse_dynamics(config.at("dynamics"), space);
  std::vector<PovmTriple> triples;
  for (const json& t : config.at("triples")) {
    triples.push_back(triple_from_json(t));
  }
  const auto schedule = config.at("schedule").get<std::vector<std::uint32_t>>();
  const FineState initial{config.at("initial_state").get<std::uint32_t>()};
  const auto seed = config.at("seed").get<std::uint64_t>();
  const ReactionMap r =
      parse_reaction(config.value("reaction", json::object()), seed);

  const ReplayResult ref = replay(initial, d, triples, schedule, r);

  json record_rows = json::array();
  for (std::size_t i = 0; i < ref.records.size(); ++i) {
    const ObservationRecord& rec = ref.records[i];
    record_rows.push_back({{"tick", rec.tick},
                           {"system", rec.system},
                           {"observable", rec.observable},
                           {"value", rec.value},
                           {"opportunity", ref.opportunity[i]}});
  }

  // Cardinality of the consistent set as the reference records are appended
  // one at a time, each evaluated over the schedule prefix that produced it.
  std::vector<std::uint64_t> cardinalities;
  cardinalities.push_back(space.size);  // empty record list
  for (std::size_t n = 1; n <= ref.records.size(); ++n) {
    const std::span<const std::uint32_t> prefix(schedule.data(),
                                                ref.opportunity[n - 1] + 1);
    const std::span<const ObservationRecord> recs(ref.records.data(), n);
    cardinalities.push_back(consistent_states(recs, d, triples, prefix, r).size());
  }

  bool monotone = true;
  for (std::size_t i = 1; i < cardinalities.size(); ++i) {
    monotone = monotone && cardinalities[i] <= cardinalities[i - 1];
  }
  const std::uint64_t final_cardinality = cardinalities.back();

  std::uint64_t min_required = 2;
  bool check_monotone = true;
  if (config.contains("expect")) {
    min_required = config.at("expect").value("min_cardinality", std::uint64_t{2});
    check_monotone = config.at("expect").value("monotone", true);
  }

  Outcome out;
  out.passed = !ref.records.empty() && final_cardinality >= min_required &&
               (!check_monotone || monotone);
  out.payload = {{"records", record_rows},
                 {"cardinalities", cardinalities},
                 {"final_cardinality", final_cardinality},
                 {"monotone_decreasing", monotone},
                 {"min_cardinality_required", min_required},
                 {"pass", out.passed}};
  return out;
}

// ---------------------------------------------------------------------------
// decohere
// ---------------------------------------------------------------------------

double parse_tau(const json& config) {
  const json& rc = config.at("rc");
  if (rc.contains("tau")) return rc.at("tau").get<double>();
  return rc.at("r").get<double>() * rc.at("c").get<double>();
}

json trace_to_json(std::span<const TraceSample> trace) {
  json rows = json::array();
  for (const TraceSample& s : trace) {
    rows.push_back({{"time", s.time},
                    {"re", s.accumulator.real()},
                    {"im", s.accumulator.imag()},
                    {"magnitude", s.magnitude()}});
  }
  return rows;
}

Outcome run_decohere_impulse(const json& config) {
  const double tau = parse_tau(config);
  const auto samples = config.value("samples", std::uint32_t{200});
  const double horizon = config.value("horizon_tau", 10.0) * tau;

  RCChannel ch = RCChannel::from_time_constant(tau);
  ch.impulse(1.0, 0.0);
  std::vector<TraceSample> trace;
  trace.push_back({ch.now(), ch.accumulator()});
  const double dt = horizon / static_cast<double>(samples);
  double max_rel_error = 0.0;
  for (std::uint32_t i = 1; i <= samples; ++i) {
    ch.evolve(dt);
    trace.push_back({ch.now(), ch.accumulator()});
    const double expected = std::exp(-ch.now() / tau);
    max_rel_error =
        std::max(max_rel_error, std::abs(ch.magnitude() - expected) / expected);
  }

  const double fitted = fit_decay_time(trace);
  const double fit_rel_error = std::abs(fitted - tau) / tau;

  double rel_bound = 1e-9;
  double fit_bound = 1e-3;
  if (config.contains("expect")) {
    rel_bound = config.at("expect").value("max_rel_error", rel_bound);
    fit_bound = config.at("expect").value("fit_rel_error", fit_bound);
  }

  Outcome out;
  out.passed = max_rel_error <= rel_bound && fit_rel_error <= fit_bound;
  out.payload = {{"mode", "impulse"},
                 {"tau", tau},
                 {"trace", trace_to_json(trace)},
                 {"max_rel_error", max_rel_error},
                 {"rel_error_bound", rel_bound},
                 {"fitted_tau", fitted},
                 {"fit_rel_error", fit_rel_error},
                 {"fit_rel_error_bound", fit_bound},
                 {"pass", out.passed}};
  return out;
}

Outcome run_decohere_cancel(const json& config) {
  const double tau = config.contains("rc") ? parse_tau(config) : 1.0;
  const auto impulses = config.at("impulses").get<std::uint64_t>();
  const double amplitude = config.value("amplitude", 1.0);
  const auto n_seeds = config.value("phase_seeds", std::uint32_t{100});
  const double spacing = config.value("spacing_tau", 1e-8) * tau;
  const auto seed = config.at("seed").get<std::uint64_t>();

  double bound_factor = 3.0;
  std::uint32_t min_passing = 95;
  if (config.contains("expect")) {
    bound_factor = config.at("expect").value("bound_factor", bound_factor);
    min_passing = config.at("expect").value("min_passing", min_passing);
  }
  const double bound =
      bound_factor * amplitude / std::sqrt(static_cast<double>(impulses));

  std::vector<ImpulseEvent> events(impulses);
  for (std::uint64_t j = 0; j < impulses; ++j) {
    events[j] = {static_cast<double>(j) * spacing, amplitude, std::nullopt};
  }

  std::uint32_t passing = 0;
  json per_seed = json::array();
  for (std::uint32_t i = 0; i < n_seeds; ++i) {
    const std::uint64_t phase_seed = stream_seed(seed, i);
    const auto trace = run_sequence(RCChannel::from_time_constant(tau), events,
                                    PhaseSource::seeded(phase_seed));
    // With the burst far inside one decoherence time, the final accumulator
    // is the phasor sum of the injected impulses; dividing by their count
    // gives the time-averaged signal seen at the observer.
    const double mean_mag =
        trace.back().magnitude() / static_cast<double>(impulses);
    const bool ok = mean_mag <= bound;
    passing += ok ? 1 : 0;
    per_seed.push_back({{"seed_index", i},
                        {"time_averaged_magnitude", mean_mag},
                        {"within_bound", ok}});
  }

  Outcome out;
  out.passed = passing >= min_passing;
  out.payload = {{"mode", "cancel"},
                 {"impulses", impulses},
                 {"amplitude", amplitude},
                 {"bound", bound},
                 {"seeds", n_seeds},
                 {"passing", passing},
                 {"min_passing", min_passing},
                 {"per_seed", per_seed},
                 {"pass", out.passed}};
  return out;
}

Outcome run_decohere(const json& config) {
  const std::string mode = config.value("mode", "impulse");
  if (mode == "impulse") return run_decohere_impulse(config);
  if (mode == "cancel") return run_decohere_cancel(config);
  throw ConfigError("unknown decohere mode '" + mode + "'");
}

// ---------------------------------------------------------------------------
// bell-overlap
// ---------------------------------------------------------------------------

Outcome run_bell_overlap(const json& config) {
  const ChannelSpace space = parse_space(config);
  const ReversibleDynamics d = parse_dynamics(config.at("dynamics"), space);
  const Povm a = povm_from_json(config.at("povm_a"));
  const Povm b = povm_from_json(config.at("povm_b"));
  const auto ka = config.at("component_a").get<std::size_t>();
  const auto kb = config.at("component_b").get<std::size_t>();
  const auto delta = config.at("delta").get<std::uint32_t>();

  const auto overlap =
      separability_overlap(inverse_image(a, ka), inverse_image(b, kb), d, delta);

  json sample = json::array();
  for (std::size_t i = 0; i < overlap.size() && i < 64; ++i) {
    sample.push_back(overlap[i].index);
  }

  bool passed = true;
  if (config.contains("expect")) {
    const json& expect = config.at("expect");
    if (expect.contains("separable")) {
      passed = passed && overlap.empty() == expect.at("separable").get<bool>();
    }
    if (expect.contains("min_cardinality")) {
      passed = passed &&
               overlap.size() >= expect.at("min_cardinality").get<std::size_t>();
    }
  }

  Outcome out;
  out.passed = passed;
  out.payload = {{"delta", delta},
                 {"overlap_cardinality", overlap.size()},
                 {"overlap_sample", sample},
                 {"separable", overlap.empty()},
                 {"pass", passed}};
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// shared parsing
// ---------------------------------------------------------------------------

ChannelSpace parse_space(const json& config) {
  return ChannelSpace{config.at("channel").at("size").get<std::uint32_t>()};
}

Partition parse_partition(const json& blocks, ChannelSpace space) {
  if (blocks.contains("count")) {
    return equal_blocks(space, blocks.at("count").get<std::uint32_t>());
  }
  if (blocks.contains("ranges")) {
    Partition partition;
    for (const json& range : blocks.at("ranges")) {
      const auto lo = range.at(0).get<std::uint32_t>();
      const auto hi = range.at(1).get<std::uint32_t>();
      if (lo >= hi) throw ConfigError("block range must satisfy lo < hi");
      std::vector<std::uint32_t> block;
      for (std::uint32_t s = lo; s < hi; ++s) block.push_back(s);
      partition.push_back(std::move(block));
    }
    return partition;
  }
  throw ConfigError("blocks need either 'count' or 'ranges'");
}

ReversibleDynamics parse_dynamics(const json& dynamics, ChannelSpace space) {
  const std::string kind = dynamics.at("kind").get<std::string>();
  if (kind == "identity") {
    return make_dynamics(DynamicsKind::identity, 0, space);
  }
  if (kind == "generated") {
    return make_dynamics(DynamicsKind::generated,
                         dynamics.at("seed").get<std::uint64_t>(), space);
  }
  if (kind == "block-diagonal" || kind == "coupled") {
    const Partition blocks = parse_partition(dynamics.at("blocks"), space);
    return make_dynamics(kind == "coupled" ? DynamicsKind::coupled
                                           : DynamicsKind::block_diagonal,
                         dynamics.at("seed").get<std::uint64_t>(), space,
                         blocks);
  }
  if (kind == "table") {
    std::vector<std::uint32_t> table;
    if (dynamics.contains("table")) {
      table = dynamics.at("table").get<std::vector<std::uint32_t>>();
    } else if (dynamics.contains("table_file")) {
      std::ifstream in(dynamics.at("table_file").get<std::string>());
      if (!in) {
        throw IoError("cannot open permutation table " +
                      dynamics.at("table_file").get<std::string>());
      }
      return load_permutation(in);
    } else {
      throw ConfigError("table dynamics need 'table' or 'table_file'");
    }
    if (table.size() != space.size) {
      throw ConfigError("permutation table size does not match the channel");
    }
    return ReversibleDynamics::from_table(std::move(table));
  }
  throw ConfigError("unknown dynamics kind '" + kind + "'");
}

ReactionMap parse_reaction(const json& reaction, std::uint64_t default_seed) {
  const std::string mode = reaction.value("mode", "canonical");
  if (mode == "canonical") return ReactionMap::canonical();
  if (mode == "reseed") {
    return ReactionMap::reseed(reaction.value("seed", default_seed));
  }
  throw ConfigError("unknown reaction mode '" + mode + "'");
}

// ---------------------------------------------------------------------------
// hashing / loading
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x00000100000001b3ull;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw FixtureError("config " + path.string() + " is not valid JSON: " +
                       e.what());
  }
  if (config.contains("dynamics") && config.at("dynamics").contains("table_file")) {
    const std::filesystem::path rel =
        config.at("dynamics").at("table_file").get<std::string>();
    if (rel.is_relative()) {
      config["dynamics"]["table_file"] = (path.parent_path() / rel).string();
    }
  }
  return config;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

namespace {

void validate_povm_doc(const json& config, const char* key, ChannelSpace space,
                       bool require_nonempty_images,
                       std::vector<std::string>& out) {
  if (!config.contains(key)) {
    out.push_back(std::string("missing POVM '") + key + "'");
    return;
  }
  try {
    const Povm p = povm_from_json(config.at(key));
    if (space.size != 0 && p.space().size != space.size) {
      out.push_back(std::string(key) + ": POVM space " +
                    std::to_string(p.space().size) +
                    " does not match the channel size " +
                    std::to_string(space.size));
    }
    for (const std::string& d : completeness_diagnostics(p)) {
      out.push_back(std::string(key) + ": " + d);
    }
    if (!check_orthogonality(p)) {
      out.push_back(std::string(key) +
                    ": inverse images overlap (orthogonality fails)");
    }
    for (const std::string& d : value_diagnostics(p)) {
      out.push_back(std::string(key) + ": " + d);
    }
    if (require_nonempty_images) {
      for (std::size_t k = 1; k < p.component_count(); ++k) {
        if (p.support(k).empty()) {
          out.push_back(std::string(key) + ": component " + std::to_string(k) +
                        " has an empty inverse image");
        }
      }
    }
  } catch (const Error& e) {
    out.push_back(std::string(key) + ": " + e.what());
  }
}

void validate_dynamics_doc(const json& config, ChannelSpace space,
                           std::vector<std::string>& out) {
  if (!config.contains("dynamics")) {
    out.push_back("missing 'dynamics'");
    return;
  }
  try {
    parse_dynamics(config.at("dynamics"), space);
  } catch (const Error& e) {
    out.push_back(std::string("dynamics: ") + e.what());
  }
}

}  // namespace

std::vector<std::string> validate_config(const json& config) {
  std::vector<std::string> out;

  if (!config.is_object()) {
    out.push_back("config must be a JSON object");
    return out;
  }
  if (!config.contains("experiment") || !config.at("experiment").is_string()) {
    out.push_back("missing 'experiment' tag");
    return out;
  }
  const std::string experiment = config.at("experiment").get<std::string>();
  const bool known =
      std::find(std::begin(kKnownExperiments), std::end(kKnownExperiments),
                experiment) != std::end(kKnownExperiments);
  if (!known) {
    out.push_back("unknown experiment '" + experiment + "'");
    return out;
  }
  if (!config.contains("seed") || !config.at("seed").is_number_integer()) {
    // Replays must be fully determined by the config; seeds are never
    // defaulted implicitly.
    out.push_back("missing integer 'seed'");
  }

  auto space_or_zero = [&]() -> ChannelSpace {
    try {
      const ChannelSpace space = parse_space(config);
      if (space.size < 2) out.push_back("channel size must be >= 2");
      return space;
    } catch (const json::exception&) {
      out.push_back("missing 'channel.size'");
      return ChannelSpace{0};
    }
  };

  if (experiment == "born") {
    validate_povm_doc(config, "povm", ChannelSpace{0}, true, out);
    if (!config.contains("trials") ||
        config.at("trials").get<std::uint64_t>() < 1) {
      out.push_back("born needs trials >= 1");
    }
  } else if (experiment == "commute") {
    const ChannelSpace space = space_or_zero();
    validate_dynamics_doc(config, space, out);
    validate_povm_doc(config, "povm_a", space, false, out);
    validate_povm_doc(config, "povm_b", space, false, out);
  } else if (experiment == "counterfactual") {
    const ChannelSpace space = space_or_zero();
    validate_dynamics_doc(config, space, out);
    validate_povm_doc(config, "povm_a", space, false, out);
    validate_povm_doc(config, "povm_b", space, false, out);
    if (!config.contains("state") || !config.contains("component_a") ||
        !config.contains("component_b")) {
      out.push_back("counterfactual needs 'state', 'component_a', "
                    "'component_b'");
    } else if (out.empty()) {
      // The precondition is part of validation: the state must lie in the
      // inverse-image intersection.
      const Povm a = povm_from_json(config.at("povm_a"));
      const Povm b = povm_from_json(config.at("povm_b"));
      const FineState s{config.at("state").get<std::uint32_t>()};
      if (!inverse_image(a, config.at("component_a").get<std::size_t>())
               .contains(s) ||
          !inverse_image(b, config.at("component_b").get<std::size_t>())
               .contains(s)) {
        out.push_back("state " + std::to_string(s.index) +
                      " is not in the inverse-image intersection");
      }
    }
  } else if (experiment == "moore") {
    const ChannelSpace space = space_or_zero();
    validate_dynamics_doc(config, space, out);
    if (!config.contains("triples") || !config.at("triples").is_array() ||
        config.at("triples").empty()) {
      out.push_back("moore needs a non-empty 'triples' array");
    } else {
      for (std::size_t i = 0; i < config.at("triples").size(); ++i) {
        try {
          const PovmTriple t = triple_from_json(config.at("triples")[i]);
          if (space.size != 0 && t.identify.space().size != space.size) {
            out.push_back("triple " + std::to_string(i) +
                          ": POVM space does not match the channel size");
          }
          for (const std::string& d : triple_diagnostics(t)) {
            out.push_back("triple " + std::to_string(i) + ": " + d);
          }
        } catch (const Error& e) {
          out.push_back("triple " + std::to_string(i) + ": " + e.what());
        } catch (const json::exception& e) {
          out.push_back("triple " + std::to_string(i) + ": " + e.what());
        }
      }
    }
    if (!config.contains("schedule") || !config.at("schedule").is_array() ||
        config.at("schedule").empty()) {
      out.push_back("moore needs a non-empty 'schedule' array");
    }
    if (!config.contains("initial_state")) {
      out.push_back("moore needs 'initial_state'");
    } else if (space_or_zero().size != 0 &&
               config.at("initial_state").get<std::uint32_t>() >=
                   parse_space(config).size) {
      out.push_back("initial_state outside the channel space");
    }
  } else if (experiment == "decohere") {
    const std::string mode = config.value("mode", "impulse");
    if (mode != "impulse" && mode != "cancel") {
      out.push_back("decohere mode must be 'impulse' or 'cancel'");
    }
    if (mode == "impulse" || config.contains("rc")) {
      if (!config.contains("rc")) {
        out.push_back("decohere needs 'rc' ({tau} or {r, c})");
      } else {
        try {
          const double tau = parse_tau(config);
          if (mode == "impulse" && !(tau > 0.0)) {
            out.push_back("impulse mode needs RC > 0");
          }
          if (tau < 0.0) out.push_back("RC must be non-negative");
        } catch (const json::exception&) {
          out.push_back("rc needs either 'tau' or both 'r' and 'c'");
        }
      }
    }
    if (mode == "cancel" &&
        (!config.contains("impulses") ||
         config.at("impulses").get<std::uint64_t>() < 1)) {
      out.push_back("cancel mode needs impulses >= 1");
    }
  } else if (experiment == "bell-overlap") {
    const ChannelSpace space = space_or_zero();
    validate_dynamics_doc(config, space, out);
    validate_povm_doc(config, "povm_a", space, false, out);
    validate_povm_doc(config, "povm_b", space, false, out);
    if (!config.contains("delta") || !config.contains("component_a") ||
        !config.contains("component_b")) {
      out.push_back("bell-overlap needs 'delta', 'component_a', "
                    "'component_b'");
    }
  }

  return out;
}

// ---------------------------------------------------------------------------
// dispatch / reporting
// ---------------------------------------------------------------------------

ResultBundle run_experiment(const json& config) {
  const std::string experiment = config.at("experiment").get<std::string>();
  const auto start = std::chrono::steady_clock::now();

  Outcome outcome;
  if (experiment == "born") {
    outcome = run_born(config);
  } else if (experiment == "commute") {
    outcome = run_commute(config);
  } else if (experiment == "counterfactual") {
    outcome = run_counterfactual(config);
  } else if (experiment == "moore") {
    outcome = run_moore(config);
  } else if (experiment == "decohere") {
    outcome = run_decohere(config);
  } else if (experiment == "bell-overlap") {
    outcome = run_bell_overlap(config);
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }

  const auto stop = std::chrono::steady_clock::now();

  ResultBundle bundle;
  bundle.config = config;
  bundle.config_hash = config_hash(config);
  bundle.experiment = experiment;
  bundle.payload = std::move(outcome.payload);
  bundle.payload["config_hash"] = bundle.config_hash;
  bundle.passed = outcome.passed;
  bundle.wall_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return bundle;
}

namespace {

const char* pass_str(bool b) { return b ? "PASS" : "FAIL"; }

}  // namespace

std::string render_summary(const ResultBundle& bundle) {
  std::ostringstream out;
  const json& p = bundle.payload;
  out << "experiment " << bundle.experiment << " (config " << bundle.config_hash
      << ")\n";

  if (bundle.experiment == "born") {
    double worst_bound = 0.0;
    for (const json& row : p.at("rows")) {
      worst_bound = std::max(worst_bound, row.at("bound").get<double>());
    }
    out << "max |p_emp - p_theory| = "
        << format_double(p.at("max_abs_error").get<double>()) << " (bound "
        << format_double(worst_bound)
        << "): " << pass_str(p.at("pass").get<bool>()) << "\n";
    out << "chi_square = " << format_double(p.at("chi_square").get<double>())
        << " over " << p.at("rows").size() - 1 << " dof\n";
    out << "normalization (exact rational): "
        << pass_str(p.at("normalization_exact").get<bool>()) << "\n";
  } else if (bundle.experiment == "commute") {
    out << "tv_distance = " << format_double(p.at("tv_distance").get<double>())
        << " over " << p.at("samples").get<std::uint64_t>() << " initial states"
        << (p.at("exhaustive").get<bool>() ? " (exhaustive)" : " (sampled)")
        << ": " << pass_str(p.at("pass").get<bool>()) << "\n";
  } else if (bundle.experiment == "counterfactual") {
    auto b = [&](const char* k) { return p.at(k).get<bool>() ? "true" : "false"; };
    out << "(before, free, measured) = (" << b("in_intersection_before") << ", "
        << b("in_intersection_after_free") << ", "
        << b("in_intersection_after_measured")
        << "): " << pass_str(p.at("pass").get<bool>()) << "\n";
  } else if (bundle.experiment == "moore") {
    out << "consistent-state cardinality = "
        << p.at("final_cardinality").get<std::uint64_t>() << " (>= "
        << p.at("min_cardinality_required").get<std::uint64_t>()
        << " required): " << pass_str(p.at("pass").get<bool>()) << "\n";
    out << "cardinality trace:";
    for (const json& c : p.at("cardinalities")) {
      out << " " << c.get<std::uint64_t>();
    }
    out << " (weakly decreasing: "
        << (p.at("monotone_decreasing").get<bool>() ? "yes" : "no") << ")\n";
  } else if (bundle.experiment == "decohere") {
    if (p.at("mode") == "impulse") {
      out << "max relative error vs e^(-t/RC) = "
          << format_double(p.at("max_rel_error").get<double>()) << " (bound "
          << format_double(p.at("rel_error_bound").get<double>()) << ")\n";
      out << "fitted decay constant = "
          << format_double(p.at("fitted_tau").get<double>())
          << " vs configured " << format_double(p.at("tau").get<double>())
          << ", relative error "
          << format_double(p.at("fit_rel_error").get<double>()) << " (bound "
          << format_double(p.at("fit_rel_error_bound").get<double>())
          << "): " << pass_str(p.at("pass").get<bool>()) << "\n";
    } else {
      out << "time-averaged |accumulator| <= "
          << format_double(p.at("bound").get<double>()) << " for "
          << p.at("passing").get<std::uint32_t>() << " of "
          << p.at("seeds").get<std::uint32_t>() << " seeds (>= "
          << p.at("min_passing").get<std::uint32_t>()
          << " required): " << pass_str(p.at("pass").get<bool>()) << "\n";
    }
  } else if (bundle.experiment == "bell-overlap") {
    out << "overlap cardinality = "
        << p.at("overlap_cardinality").get<std::uint64_t>() << " (separable: "
        << (p.at("separable").get<bool>() ? "yes" : "no")
        << "): " << pass_str(p.at("pass").get<bool>()) << "\n";
  }

  out << "result: " << pass_str(bundle.passed) << "\n";
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_payload_csvs(const ResultBundle& bundle,
                        const std::filesystem::path& dir) {
  const json& p = bundle.payload;
  if (bundle.experiment == "born") {
    std::ostringstream csv;
    csv << "component,value,m_k,p_theory,p_empirical,abs_error\n";
    for (const json& row : p.at("rows")) {
      csv << row.at("component").get<std::size_t>() << ','
          << row.at("value").get<double>() << ','
          << row.at("m_k").get<std::uint64_t>() << ','
          << row.at("p_theory").get<double>() << ','
          << row.at("p_empirical").get<double>() << ','
          << row.at("abs_error").get<double>() << '\n';
    }
    write_file(dir / "frequencies.csv", csv.str());
  } else if (bundle.experiment == "commute") {
    json stats = p;
    stats.erase("expect");
    stats.erase("pass");
    stats.erase("config_hash");
    write_file(dir / "order_stats.json", stats.dump(2) + "\n");
  } else if (bundle.experiment == "moore") {
    std::ostringstream csv;
    csv << "tick,system,observable,value\n";
    for (const json& row : p.at("records")) {
      csv << row.at("tick").get<std::uint64_t>() << ','
          << row.at("system").get<int>() << ','
          << row.at("observable").get<int>() << ','
          << row.at("value").get<double>() << '\n';
    }
    write_file(dir / "records.csv", csv.str());
  } else if (bundle.experiment == "decohere" && p.at("mode") == "impulse") {
    std::ostringstream csv;
    csv << "time,re,im,magnitude\n";
    for (const json& row : p.at("trace")) {
      csv << row.at("time").get<double>() << ','
          << row.at("re").get<double>() << ',' << row.at("im").get<double>()
          << ',' << row.at("magnitude").get<double>() << '\n';
    }
    write_file(dir / "trace.csv", csv.str());
  }
}

}  // namespace

void emit_report(const ResultBundle& bundle,
                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());

  json doc = {{"config", bundle.config},
              {"config_hash", bundle.config_hash},
              {"experiment", bundle.experiment},
              {"payload", bundle.payload},
              {"meta", {{"wall_ms", bundle.wall_ms}}}};
  write_file(out_dir / "bundle.json", doc.dump(2) + "\n");
  write_payload_csvs(bundle, out_dir);
  write_file(out_dir / "summary.txt", render_summary(bundle));
}

ResultBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bundle " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FixtureError("bundle " + path.string() + " is not valid JSON: " +
                       e.what());
  }
  ResultBundle bundle;
  bundle.config = doc.at("config");
  bundle.config_hash = doc.at("config_hash").get<std::string>();
  bundle.experiment = doc.at("experiment").get<std::string>();
  bundle.payload = doc.at("payload");
  bundle.passed = bundle.payload.value("pass", false);
  bundle.wall_ms = doc.at("meta").value("wall_ms", 0.0);
  return bundle;
}

int run_and_report(json config, const std::filesystem::path& out_dir,
                   std::ostream& log) {
  const auto diagnostics = validate_config(config);
  if (!diagnostics.empty()) {
    for (const std::string& d : diagnostics) {
      log << "invalid: " << d << "\n";
    }
    return kExitValidation;
  }

  ResultBundle bundle;
  try {
    bundle = run_experiment(config);
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    emit_report(bundle, out_dir);
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }

  log << render_summary(bundle);
  return bundle.passed ? kExitOk : kExitThreshold;
}

}  // namespace minobs
