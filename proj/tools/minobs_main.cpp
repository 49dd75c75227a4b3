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

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "minobs/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::int64_t seed = -1;
  bool seed_set = false;
  bool exhaustive = false;
};

nlohmann::json load_effective_config(const CommonOpts& opts) {
  nlohmann::json config = minobs::load_config_file(opts.config_path);
  if (opts.seed_set) config["seed"] = opts.seed;
  if (opts.exhaustive) config["sampling"]["exhaustive"] = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minobs: deterministic channel / observer experiments"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required();
    if (with_out) {
      cmd->add_option("--out", opts.out_dir, "output directory");
    }
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_flag("--exhaustive", opts.exhaustive,
                  "force brute-force sampling where N permits");
  };

  CLI::App* run = app.add_subcommand("run", "validate, execute and report");
  add_common(run, true);

  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running it");
  add_common(validate, false);

  CLI::App* report =
      app.add_subcommand("report", "re-emit tables and summary from a bundle");
  std::string bundle_path;
  std::string report_out = "out";
  report->add_option("--bundle", bundle_path, "bundle.json produced by run")
      ->required();
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const nlohmann::json config = load_effective_config(opts);
      return minobs::run_and_report(config, opts.out_dir, std::cout);
    }
    if (validate->parsed()) {
      const nlohmann::json config = load_effective_config(opts);
      const auto diagnostics = minobs::validate_config(config);
      if (diagnostics.empty()) {
        std::cout << "config is valid\n";
        return minobs::kExitOk;
      }
      for (const auto& d : diagnostics) std::cout << "invalid: " << d << "\n";
      return minobs::kExitValidation;
    }
    if (report->parsed()) {
      const minobs::ResultBundle bundle = minobs::load_bundle(bundle_path);
      minobs::emit_report(bundle, report_out);
      std::cout << minobs::render_summary(bundle);
      return bundle.passed ? minobs::kExitOk : minobs::kExitThreshold;
    }
  } catch (const minobs::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return minobs::kExitIo;
  } catch (const minobs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return minobs::kExitValidation;
  }
  return minobs::kExitOk;
}
