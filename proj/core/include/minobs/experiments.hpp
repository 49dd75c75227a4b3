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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "minobs/channel.hpp"
#include "minobs/measurement.hpp"
#include "minobs/povm.hpp"

namespace minobs {

// Scriptable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitThreshold = 3;
inline constexpr int kExitIo = 4;

/// Everything a finished experiment hands back: the effective config it ran
/// from, the deterministic scientific payload, and wall-clock metadata that
/// is deliberately kept out of the payload.
struct ResultBundle {
  nlohmann::json config;
  std::string config_hash;
  std::string experiment;
  nlohmann::json payload;
  bool passed = false;
  double wall_ms = 0.0;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of the canonical (sorted-key) dump of the effective config.
std::string config_hash(const nlohmann::json& config);

/// Reads a config document; "table_file" dynamics paths are resolved
/// relative to the config's directory. Throws IoError / FixtureError.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// All invariant violations the config would hit at runtime, without running
/// the experiment: completeness sums (naming the state), orthogonality,
/// containment, value collisions, partition and schedule checks.
std::vector<std::string> validate_config(const nlohmann::json& config);

/// Dispatches to the named experiment. The config must validate.
ResultBundle run_experiment(const nlohmann::json& config);

/// Human-readable pass/fail summary for a bundle.
std::string render_summary(const ResultBundle& bundle);

/// Writes bundle.json, the per-experiment CSV/JSON tables, and summary.txt
/// under out_dir. Throws IoError when the directory is unwritable.
void emit_report(const ResultBundle& bundle,
                 const std::filesystem::path& out_dir);

/// Reads back a bundle.json written by emit_report.
ResultBundle load_bundle(const std::filesystem::path& path);

/// validate + run + report; returns one of the exit codes above and logs
/// diagnostics / the summary to `log`.
int run_and_report(nlohmann::json config, const std::filesystem::path& out_dir,
                   std::ostream& log);

// Parsing helpers shared with the test suites.
ChannelSpace parse_space(const nlohmann::json& config);
Partition parse_partition(const nlohmann::json& blocks, ChannelSpace space);
ReversibleDynamics parse_dynamics(const nlohmann::json& dynamics,
                                  ChannelSpace space);
ReactionMap parse_reaction(const nlohmann::json& reaction,
                           std::uint64_t default_seed);

}  // namespace minobs
