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
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "minobs/channel.hpp"
#include "minobs/measurement.hpp"
#include "minobs/povm.hpp"

namespace minobs {

/// One append-only memory entry. Only non-zero values are ever recorded.
struct ObservationRecord {
  std::uint64_t tick = 0;  // memory-allocation counter, 1-based
  int system = 0;          // system id i of the triple that fired
  int observable = 0;      // selector slot j, 1-based
  double value = 0.0;      // the recorded a^i_jk, never 0

  friend auto operator<=>(const ObservationRecord&,
                          const ObservationRecord&) = default;
};

/// Asks the harness to deposit the measurement back-action for the record
/// that was just allocated.
struct ReactionRequest {
  std::size_t triple_index = 0;
  int system = 0;
  int observable = 0;       // selector slot j, 1-based
  std::size_t component = 0;  // component k of the observable that fired
};

struct CycleOutcome {
  std::optional<ObservationRecord> record;
  std::optional<ReactionRequest> reaction;
};

/// One pass through the control structure without touching any memory:
/// triples are scanned in order; the first whose identify outcome is accepted
/// evaluates its selector; a hot slot applies the selected observable.
/// next_tick is the tick the record would be allocated with.
CycleOutcome control_cycle(const std::vector<PovmTriple>& triples, FineState s,
                           std::uint64_t next_tick);

/// The minimal observer: POVM triples inside the control loop, an append-only
/// record memory, and the memory-allocation clock that defines the observer's
/// arrow of time. Single-threaded by design; its memory is a serial log.
class MinimalObserver {
 public:
  /// Throws ConfigError when any triple fails its structural checks.
  explicit MinimalObserver(std::vector<PovmTriple> triples);

  /// Runs one control cycle on s. On success the record is appended, the
  /// tick advances, and the reaction request is handed to the caller; the
  /// observer itself never mutates the channel.
  CycleOutcome run_control_cycle(FineState s);

  /// Records in allocation order.
  const std::vector<ObservationRecord>& memory_dump() const { return memory_; }

  std::uint64_t tick() const { return tick_; }
  const std::vector<PovmTriple>& triples() const { return triples_; }

 private:
  std::vector<PovmTriple> triples_;
  std::vector<ObservationRecord> memory_;
  std::uint64_t tick_ = 0;
};

/// Deterministic replay of a whole experiment from one initial state.
/// schedule[t] is the number of dynamics steps applied before observation
/// opportunity t; reactions are deposited through r as records fire.
struct ReplayResult {
  std::vector<ObservationRecord> records;
  std::vector<std::size_t> opportunity;  // opportunity index of each record
  FineState final_state;
};

ReplayResult replay(FineState initial, const ReversibleDynamics& d,
                    const std::vector<PovmTriple>& triples,
                    std::span<const std::uint32_t> schedule,
                    const ReactionMap& r);

/// The exact set of initial fine states whose replay reproduces `records`
/// verbatim, by exhaustive scan over all N initial states. An empty result
/// means the record list is inconsistent with the model.
std::vector<FineState> consistent_states(
    std::span<const ObservationRecord> records, const ReversibleDynamics& d,
    const std::vector<PovmTriple>& triples,
    std::span<const std::uint32_t> schedule, const ReactionMap& r);

/// CSV dump: header "tick,system,observable,value", one row per record.
void write_records_csv(std::span<const ObservationRecord> records,
                       std::ostream& out);

}  // namespace minobs
