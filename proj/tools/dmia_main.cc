// Copyright 2026 The DMIA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// dmia: membership inference lab for diffusion models.
//
//   dmia gen    --config run.json   synthetic dataset + member split
//   dmia train  --config run.json   fit the noise predictor on members
//   dmia attack --config run.json   score every sample, write records.jsonl
//   dmia eval   --config run.json   report.json/.txt and SVG plots
//   dmia sweep  --config run.json --axis sigma --values 0.01,0.1,1
//
// --seed and --out override the config's master_seed and output_dir.
// DMIA_LOG=error|info|debug sets verbosity (default info).

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dmia/config.h"
#include "dmia/pipeline.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace {

// Exit code for command-line syntax errors, distinct from the error-class
// codes in dmia::ExitCodeFor.
constexpr int kUsageExitCode = 64;

absl::Status ConfigureLogging() {
  spdlog::set_default_logger(spdlog::stderr_color_st("dmia"));
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("DMIA_LOG");
  const std::string level = env == nullptr ? "info" : env;
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    return absl::InvalidArgumentError(
        "DMIA_LOG: must be one of error, info, debug (got '" + level + "')");
  }
  return absl::OkStatus();
}

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool parallel = false;
  std::string axis;
  std::vector<std::string> values;
};

// flag > config file > built-in default.
absl::StatusOr<dmia::RunConfig> ResolveConfig(const Flags& flags) {
  dmia::RunConfig config;
  if (!flags.config_path.empty()) {
    absl::StatusOr<dmia::RunConfig> loaded =
        dmia::LoadConfig(flags.config_path);
    if (!loaded.ok()) return loaded.status();
    config = *std::move(loaded);
  }
  if (flags.seed.has_value()) config.master_seed = *flags.seed;
  if (flags.out.has_value()) config.output_dir = *flags.out;
  if (flags.parallel) config.parallel = true;
  return config;
}

absl::Status Run(const std::string& command, const Flags& flags) {
  absl::StatusOr<dmia::RunConfig> config = ResolveConfig(flags);
  if (!config.ok()) return config.status();
  spdlog::debug("config hash {}", dmia::ConfigHash(*config));
  if (command == "gen") return dmia::CmdGen(*config);
  if (command == "train") return dmia::CmdTrain(*config);
  if (command == "attack") return dmia::CmdAttack(*config);
  if (command == "eval") return dmia::CmdEval(*config);
  absl::StatusOr<dmia::SweepAxis> axis = dmia::ParseSweepAxis(flags.axis);
  if (!axis.ok()) return axis.status();
  return dmia::CmdSweep(*config, *axis, flags.values);
}

}  // namespace

int main(int argc, char** argv) {
  if (absl::Status status = ConfigureLogging(); !status.ok()) {
    std::cerr << "dmia: " << status.message() << "\n";
    return dmia::ExitCodeFor(status);
  }

  CLI::App app{"Membership inference lab for diffusion models"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "JSON run config")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "Override master_seed");
    cmd->add_option("--out", flags.out, "Override output_dir");
  };
  add_common(app.add_subcommand("gen", "Generate dataset and member split"));
  add_common(app.add_subcommand("train", "Train the noise predictor"));
  add_common(app.add_subcommand("attack", "Score all samples"));
  add_common(app.add_subcommand("eval", "Write reports and plots"));
  CLI::App* sweep =
      app.add_subcommand("sweep", "Attack + eval over a parameter grid");
  add_common(sweep);
  sweep->add_option("--axis", flags.axis, "attack_t|sigma|k|stride_m|metric")
      ->required();
  sweep->add_option("--values", flags.values, "Comma-separated grid")
      ->required()
      ->delimiter(',');
  sweep->add_flag("--parallel", flags.parallel,
                  "One worker thread per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExitCode;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const absl::Status status = Run(command, flags);
  if (!status.ok()) {
    spdlog::error("{}: {}", command, std::string(status.message()));
    return dmia::ExitCodeFor(status);
  }
  return 0;
}
