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

#include "minobs/observer.hpp"

#include <charconv>
#include <ostream>

namespace minobs {

CycleOutcome control_cycle(const std::vector<PovmTriple>& triples, FineState s,
                           std::uint64_t next_tick) {
  for (std::size_t ti = 0; ti < triples.size(); ++ti) {
    const PovmTriple& triple = triples[ti];

    const std::size_t id_k = apply_component(triple.identify, s);
    if (id_k == 0) continue;  // not this system; try the next triple
    if (!triple.accept.contains(triple.identify.component(id_k).value())) {
      continue;  // identified but not in a "ready" state
    }

    // First accepted triple wins; a cold selector ends the cycle rather than
    // falling through to later triples (the blocks chain left to right).
    const std::size_t slot = apply_component(triple.select, s);
    if (slot == 0) return {};
    if (slot > triple.observables.size()) {
      throw ConfigError("selector slot " + std::to_string(slot) +
                        " has no observable");
    }

    const Povm& obs = triple.observables[slot - 1];
    const std::size_t k = apply_component(obs, s);
    if (k == 0) return {};
    const double value = obs.component(k).value();
    if (value == 0.0) return {};

    CycleOutcome out;
    out.record = ObservationRecord{next_tick, triple.system_id,
                                   static_cast<int>(slot), value};
    out.reaction = ReactionRequest{ti, triple.system_id,
                                   static_cast<int>(slot), k};
    return out;
  }
  return {};
}

MinimalObserver::MinimalObserver(std::vector<PovmTriple> triples)
    : triples_(std::move(triples)) {
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    const auto problems = triple_diagnostics(triples_[i]);
    if (!problems.empty()) {
      throw ConfigError("triple " + std::to_string(i) +
                        " is malformed: " + problems.front());
    }
  }
}

CycleOutcome MinimalObserver::run_control_cycle(FineState s) {
  CycleOutcome out = control_cycle(triples_, s, tick_ + 1);
  if (out.record) {
    // "Allocate new memory block": recording is mandatory once a selector
    // fires with a non-NULL, non-zero outcome.
    memory_.push_back(*out.record);
    ++tick_;
  }
  return out;
}

ReplayResult replay(FineState initial, const ReversibleDynamics& d,
                    const std::vector<PovmTriple>& triples,
                    std::span<const std::uint32_t> schedule,
                    const ReactionMap& r) {
  ReplayResult result;
  FineState s = initial;
  std::uint64_t tick = 0;
  for (std::size_t opp = 0; opp < schedule.size(); ++opp) {
    s = step_n(s, d, schedule[opp]);
    CycleOutcome out = control_cycle(triples, s, tick + 1);
    if (out.record) {
      ++tick;
      result.records.push_back(*out.record);
      result.opportunity.push_back(opp);
      const ReactionRequest& req = *out.reaction;
      s = r.transform(s, triples[req.triple_index].observables[req.observable - 1],
                      req.component, tick);
    }
  }
  result.final_state = s;
  return result;
}

std::vector<FineState> consistent_states(
    std::span<const ObservationRecord> records, const ReversibleDynamics& d,
    const std::vector<PovmTriple>& triples,
    std::span<const std::uint32_t> schedule, const ReactionMap& r) {
  std::vector<FineState> consistent;
  for (std::uint32_t s0 = 0; s0 < d.size(); ++s0) {
    const ReplayResult run = replay(FineState{s0}, d, triples, schedule, r);
    if (run.records.size() != records.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!(run.records[i] == records[i])) {
        match = false;
        break;
      }
    }
    if (match) consistent.push_back(FineState{s0});
  }
  return consistent;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

}  // namespace

void write_records_csv(std::span<const ObservationRecord> records,
                       std::ostream& out) {
  out << "tick,system,observable,value\n";
  for (const auto& rec : records) {
    std::string line;
    line += std::to_string(rec.tick);
    line += ',';
    line += std::to_string(rec.system);
    line += ',';
    line += std::to_string(rec.observable);
    line += ',';
    append_double(line, rec.value);
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing records CSV");
}

}  // namespace minobs
