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


#ifndef DMIA_CONFIG_H_
#define DMIA_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dmia/attack.h"
#include "dmia/baselines.h"
#include "dmia/datasets.h"
#include "dmia/denoiser.h"
#include "dmia/diffusion.h"
#include "nlohmann/json.hpp"

namespace dmia {

struct DatasetSpec {
  SyntheticKind kind = SyntheticKind::kPatternedPatches8x8;
  std::size_t count = 512;
  double member_fraction = 0.5;
};

struct ScheduleSpec {
  int total_steps = kDefaultTotalSteps;
  double beta_start = kDefaultBetaStart;
  double beta_end = kDefaultBetaEnd;
};

struct ModelSpec {
  std::vector<std::size_t> hidden_dims = {128, 128};
};

struct BaselineSpec {
  bool naive_loss = true;
  bool secmi = true;
  BaselineConfig config;
};

struct EvalSpec {
  std::vector<double> fpr_targets = {0.01, 0.001};
  int histogram_bins = 30;
};

// One JSON document drives every subcommand. TrainConfig::seed is not read
// from the document; the pipeline derives it from master_seed.
struct RunConfig {
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  // Sweep grid points run on worker threads instead of sequentially.
  bool parallel = false;
  DatasetSpec dataset;
  ScheduleSpec schedule;
  ModelSpec model;
  TrainConfig train;
  AttackConfig attack;
  BaselineSpec baselines;
  EvalSpec eval;
};

// Missing keys keep their defaults; unknown keys are rejected. A missing
// baselines.baseline_t follows attack.attack_t.
absl::StatusOr<RunConfig> ConfigFromJson(const nlohmann::json& j);
absl::StatusOr<RunConfig> LoadConfig(const std::string& path);
nlohmann::json ConfigToJson(const RunConfig& config);

// Every violation is an invalid-argument error whose message starts with
// the dotted field name, e.g. "attack.k: must be >= 2 (got 1)".
absl::Status ValidateConfig(const RunConfig& config);

// 16 hex digits of FNV-1a/64 over the canonical JSON, excluding the fields
// that cannot change results (output_dir, parallel).
std::string ConfigHash(const RunConfig& config);

absl::StatusOr<NoiseSchedule> BuildSchedule(const RunConfig& config);

}  // namespace dmia

#endif  // DMIA_CONFIG_H_
