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


#ifndef DMIA_PIPELINE_H_
#define DMIA_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dmia/config.h"
#include "dmia/datasets.h"
#include "dmia/denoiser.h"
#include "dmia/diffusion.h"
#include "dmia/evaluation.h"
#include "dmia/numerics.h"

namespace dmia {

// One independent stream per logical purpose, all children of
// SeededRng(master_seed, 0). New purposes get new ids; existing ids never
// change.
enum class RngPurpose : std::uint64_t {
  kData = 1,
  kSplit = 2,
  kInit = 3,
  kTrain = 4,
  kAttack = 5,
  kBaseline = 6,
};
SeededRng PurposeStream(std::uint64_t master_seed, RngPurpose purpose);

// File layout inside RunConfig::output_dir.
struct RunPaths {
  std::string dataset;     // dataset.dset
  std::string split;       // split.json
  std::string checkpoint;  // model.ckpt
  std::string loss_trace;  // loss_trace.json
  std::string records;     // records.jsonl
};
RunPaths PathsFor(const std::string& output_dir);

inline constexpr absl::string_view kNaiveLossTag = "naive-loss";
inline constexpr absl::string_view kSecmiTag = "secmi-style";
// "aggregation-<metric>".
std::string AggregationTag(AggregationMetric metric);

struct LabeledData {
  Dataset dataset;
  SplitManifest split;
  std::vector<bool> is_member;  // indexed by sample id
  std::vector<Vector> members;
};

absl::StatusOr<LabeledData> GenerateData(const RunConfig& config);
absl::StatusOr<LabeledData> Label(Dataset dataset, SplitManifest split);

absl::StatusOr<TrainResult> TrainModel(const RunConfig& config,
                                       const NoiseSchedule& schedule,
                                       const LabeledData& data);

// Scores every sample; sample i draws its injection noise from
// PurposeStream(seed, kAttack).Substream(i), so records are independent of
// evaluation order and of which other attacks run.
absl::StatusOr<std::vector<ScoredRecord>> RunAggregationAttack(
    const RunConfig& config, const NoiseSchedule& schedule,
    const NoisePredictor& model, const LabeledData& data,
    absl::string_view config_hash);

// The baselines enabled in config.baselines, appended tag by tag.
absl::StatusOr<std::vector<ScoredRecord>> RunBaselines(
    const RunConfig& config, const NoiseSchedule& schedule,
    const NoisePredictor& model, const LabeledData& data,
    absl::string_view config_hash);

// Subcommands. Each reads its inputs from and writes its outputs to
// config.output_dir.
absl::Status CmdGen(const RunConfig& config);
absl::Status CmdTrain(const RunConfig& config);
absl::Status CmdAttack(const RunConfig& config);
absl::Status CmdEval(const RunConfig& config);

enum class SweepAxis { kAttackT, kSigma, kK, kStrideM, kMetric };
absl::StatusOr<SweepAxis> ParseSweepAxis(absl::string_view name);
absl::string_view SweepAxisName(SweepAxis axis);

// Copy of `config` with one attack field replaced; validated.
absl::StatusOr<RunConfig> WithSweepValue(const RunConfig& config,
                                         SweepAxis axis,
                                         absl::string_view value);

// Aggregation attack + evaluation per grid point. Writes
// sweep_<axis>/<axis>=<value>/{records.jsonl,report.json,report.txt} plus
// sweep_<axis>/sweep.csv and sweep_<axis>/sweep.svg.
absl::Status CmdSweep(const RunConfig& config, SweepAxis axis,
                      const std::vector<std::string>& values);

// Tags a NotFound status so ExitCodeFor can tell a missing checkpoint from
// other missing inputs.
absl::Status MissingCheckpointError(const std::string& path);

// Process exit code per error class:
//   0 ok, 1 internal, 2 invalid argument / config violation,
//   3 missing checkpoint, 4 other missing input, 5 unwritable output,
//   6 corrupt file, 7 numeric degenerate, 8 training diverged,
//   9 eval degenerate.
int ExitCodeFor(const absl::Status& status);

}  // namespace dmia

#endif  // DMIA_PIPELINE_H_
