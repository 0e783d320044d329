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


#include "dmia/pipeline.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/cord.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "binary_io.h"
#include "dmia/attack.h"
#include "dmia/baselines.h"
#include "dmia/report.h"
#include "dmia/status.h"
#include "nlohmann/json.hpp"
#include "spdlog/spdlog.h"

namespace dmia {
namespace {

namespace fs = std::filesystem;

constexpr absl::string_view kMissingCheckpointPayload =
    "type.dmia/missing-checkpoint";

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(absl::StrCat(
        "cannot create output directory ", dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<LabeledData> LoadInputs(const RunPaths& paths) {
  DMIA_ASSIGN_OR_RETURN(Dataset dataset, LoadDataset(paths.dataset));
  DMIA_ASSIGN_OR_RETURN(std::string text, internal::ReadFile(paths.split));
  const nlohmann::json j =
      nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::DataLossError(
        absl::StrCat("split manifest ", paths.split, " is not valid JSON"));
  }
  DMIA_ASSIGN_OR_RETURN(SplitManifest split,
                        SplitFromJson(j, dataset.samples.size()));
  return Label(std::move(dataset), std::move(split));
}

absl::StatusOr<MlpPredictor> LoadModelFor(const RunPaths& paths,
                                          const LabeledData& data) {
  if (!fs::exists(paths.checkpoint)) {
    return MissingCheckpointError(paths.checkpoint);
  }
  DMIA_ASSIGN_OR_RETURN(MlpPredictor model, LoadCheckpoint(paths.checkpoint));
  if (model.input_dim() != data.dataset.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "checkpoint input_dim ", model.input_dim(),
        " does not match dataset dim ", data.dataset.dim));
  }
  return model;
}

ScoredRecord MakeRecord(const LabeledData& data, std::size_t i, double score,
                        std::uint64_t queries, absl::string_view tag,
                        absl::string_view metric,
                        absl::string_view config_hash) {
  ScoredRecord r;
  r.sample_id = i;
  r.is_member = data.is_member[i];
  r.score = score;
  r.queries = queries;
  r.attack_tag = std::string(tag);
  r.metric = std::string(metric);
  r.config_hash = std::string(config_hash);
  return r;
}

absl::Status WriteRecords(const std::vector<ScoredRecord>& records,
                          const std::string& path) {
  return internal::WriteFile(path, RecordsToJsonLines(records));
}

struct SweepPoint {
  std::string value;
  RunConfig config;
  std::string hash;
  EvalReport report;
  absl::Status status;
};

absl::Status RunSweepPoint(const NoiseSchedule& schedule,
                           const MlpPredictor& model, const LabeledData& data,
                           const std::string& dir, SweepPoint& point) {
  DMIA_ASSIGN_OR_RETURN(
      std::vector<ScoredRecord> records,
      RunAggregationAttack(point.config, schedule, model, data, point.hash));
  DMIA_ASSIGN_OR_RETURN(point.report,
                        Evaluate(records, point.config.eval.fpr_targets));
  DMIA_RETURN_IF_ERROR(EnsureDir(dir));
  DMIA_RETURN_IF_ERROR(
      WriteRecords(records, (fs::path(dir) / "records.jsonl").string()));
  const EvalReport reports[] = {point.report};
  return EmitReport(reports, dir);
}

}  // namespace

SeededRng PurposeStream(std::uint64_t master_seed, RngPurpose purpose) {
  return SeededRng(master_seed, 0)
      .Substream(static_cast<std::uint64_t>(purpose));
}

RunPaths PathsFor(const std::string& output_dir) {
  const fs::path base(output_dir);
  return RunPaths{
      .dataset = (base / "dataset.dset").string(),
      .split = (base / "split.json").string(),
      .checkpoint = (base / "model.ckpt").string(),
      .loss_trace = (base / "loss_trace.json").string(),
      .records = (base / "records.jsonl").string(),
  };
}

std::string AggregationTag(AggregationMetric metric) {
  return absl::StrCat("aggregation-", AggregationMetricName(metric));
}

absl::StatusOr<LabeledData> Label(Dataset dataset, SplitManifest split) {
  LabeledData data;
  data.is_member.assign(dataset.samples.size(), false);
  for (std::size_t i : split.member_indices) {
    if (i >= dataset.samples.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("member index ", i, " outside the dataset"));
    }
    data.is_member[i] = true;
    data.members.push_back(dataset.samples[i]);
  }
  data.dataset = std::move(dataset);
  data.split = std::move(split);
  return data;
}

absl::StatusOr<LabeledData> GenerateData(const RunConfig& config) {
  SeededRng data_rng = PurposeStream(config.master_seed, RngPurpose::kData);
  DMIA_ASSIGN_OR_RETURN(
      Dataset dataset,
      GenerateSynthetic(config.dataset.kind, config.dataset.count, data_rng));
  SeededRng split_rng = PurposeStream(config.master_seed, RngPurpose::kSplit);
  DMIA_ASSIGN_OR_RETURN(
      SplitManifest split,
      Split(dataset, config.dataset.member_fraction, split_rng));
  return Label(std::move(dataset), std::move(split));
}

absl::StatusOr<TrainResult> TrainModel(const RunConfig& config,
                                       const NoiseSchedule& schedule,
                                       const LabeledData& data) {
  SeededRng init_rng = PurposeStream(config.master_seed, RngPurpose::kInit);
  DMIA_ASSIGN_OR_RETURN(
      MlpPredictor model,
      MlpPredictor::Create(data.dataset.dim, config.model.hidden_dims,
                           init_rng));
  TrainConfig train = config.train;
  train.seed = PurposeStream(config.master_seed, RngPurpose::kTrain).NextU64();
  return Train(std::move(model), schedule, data.members, train);
}

absl::StatusOr<std::vector<ScoredRecord>> RunAggregationAttack(
    const RunConfig& config, const NoiseSchedule& schedule,
    const NoisePredictor& model, const LabeledData& data,
    absl::string_view config_hash) {
  DMIA_RETURN_IF_ERROR(ValidateAttackConfig(config.attack, schedule));
  const SeededRng base = PurposeStream(config.master_seed, RngPurpose::kAttack);
  const std::string tag = AggregationTag(config.attack.metric);
  const absl::string_view metric = AggregationMetricName(config.attack.metric);
  std::vector<ScoredRecord> records;
  records.reserve(data.dataset.samples.size());
  for (std::size_t i = 0; i < data.dataset.samples.size(); ++i) {
    SeededRng rng = base.Substream(i);
    DMIA_ASSIGN_OR_RETURN(AttackResult result,
                          AttackSample(schedule, model, data.dataset.samples[i],
                                       config.attack, rng));
    records.push_back(MakeRecord(data, i, result.score, result.queries, tag,
                                 metric, config_hash));
  }
  return records;
}

absl::StatusOr<std::vector<ScoredRecord>> RunBaselines(
    const RunConfig& config, const NoiseSchedule& schedule,
    const NoisePredictor& model, const LabeledData& data,
    absl::string_view config_hash) {
  const BaselineConfig& bc = config.baselines.config;
  std::vector<ScoredRecord> records;
  if (config.baselines.naive_loss) {
    const SeededRng base =
        PurposeStream(config.master_seed, RngPurpose::kBaseline);
    for (std::size_t i = 0; i < data.dataset.samples.size(); ++i) {
      SeededRng rng = base.Substream(i);
      DMIA_ASSIGN_OR_RETURN(
          BaselineResult result,
          NaiveLossScore(schedule, model, data.dataset.samples[i], bc, rng));
      records.push_back(MakeRecord(data, i, result.score, result.queries,
                                   kNaiveLossTag, kNaiveLossTag, config_hash));
    }
  }
  if (config.baselines.secmi) {
    for (std::size_t i = 0; i < data.dataset.samples.size(); ++i) {
      DMIA_ASSIGN_OR_RETURN(
          BaselineResult result,
          SecmiScore(schedule, model, data.dataset.samples[i], bc));
      records.push_back(MakeRecord(data, i, result.score, result.queries,
                                   kSecmiTag, kSecmiTag, config_hash));
    }
  }
  return records;
}

absl::Status CmdGen(const RunConfig& config) {
  DMIA_RETURN_IF_ERROR(ValidateConfig(config));
  const std::string hash = ConfigHash(config);
  DMIA_ASSIGN_OR_RETURN(LabeledData data, GenerateData(config));
  DMIA_RETURN_IF_ERROR(EnsureDir(config.output_dir));
  const RunPaths paths = PathsFor(config.output_dir);
  DMIA_RETURN_IF_ERROR(SaveDataset(data.dataset, paths.dataset));
  nlohmann::json split = SplitToJson(data.split);
  split["config_hash"] = hash;
  DMIA_RETURN_IF_ERROR(internal::WriteFile(paths.split, split.dump(2) + "\n"));
  spdlog::info("gen: {} samples of dim {} ({} members) -> {}",
               data.dataset.samples.size(), data.dataset.dim,
               data.members.size(), config.output_dir);
  return absl::OkStatus();
}

absl::Status CmdTrain(const RunConfig& config) {
  DMIA_RETURN_IF_ERROR(ValidateConfig(config));
  const std::string hash = ConfigHash(config);
  DMIA_ASSIGN_OR_RETURN(NoiseSchedule schedule, BuildSchedule(config));
  const RunPaths paths = PathsFor(config.output_dir);
  DMIA_ASSIGN_OR_RETURN(LabeledData data, LoadInputs(paths));
  spdlog::info("train: {} epochs on {} members", config.train.epochs,
               data.members.size());
  DMIA_ASSIGN_OR_RETURN(TrainResult result,
                        TrainModel(config, schedule, data));
  DMIA_RETURN_IF_ERROR(SaveCheckpoint(result.model, paths.checkpoint));
  const nlohmann::json trace = {{"config_hash", hash},
                                {"loss", result.loss_trace}};
  DMIA_RETURN_IF_ERROR(
      internal::WriteFile(paths.loss_trace, trace.dump() + "\n"));
  spdlog::info("train: final epoch loss {:.4f} -> {}",
               result.loss_trace.back(), paths.checkpoint);
  return absl::OkStatus();
}

absl::Status CmdAttack(const RunConfig& config) {
  DMIA_RETURN_IF_ERROR(ValidateConfig(config));
  const std::string hash = ConfigHash(config);
  DMIA_ASSIGN_OR_RETURN(NoiseSchedule schedule, BuildSchedule(config));
  const RunPaths paths = PathsFor(config.output_dir);
  DMIA_ASSIGN_OR_RETURN(LabeledData data, LoadInputs(paths));
  DMIA_ASSIGN_OR_RETURN(MlpPredictor model, LoadModelFor(paths, data));
  DMIA_ASSIGN_OR_RETURN(
      std::vector<ScoredRecord> records,
      RunAggregationAttack(config, schedule, model, data, hash));
  DMIA_ASSIGN_OR_RETURN(std::vector<ScoredRecord> baseline,
                        RunBaselines(config, schedule, model, data, hash));
  records.insert(records.end(), baseline.begin(), baseline.end());
  DMIA_RETURN_IF_ERROR(WriteRecords(records, paths.records));
  spdlog::info("attack: {} records, {} model queries -> {}", records.size(),
               model.query_count(), paths.records);
  return absl::OkStatus();
}

absl::Status CmdEval(const RunConfig& config) {
  DMIA_RETURN_IF_ERROR(ValidateConfig(config));
  const RunPaths paths = PathsFor(config.output_dir);
  DMIA_ASSIGN_OR_RETURN(std::string text, internal::ReadFile(paths.records));
  DMIA_ASSIGN_OR_RETURN(std::vector<ScoredRecord> records,
                        RecordsFromJsonLines(text));
  if (records.empty()) {
    return EvalDegenerateError(absl::StrCat(paths.records, " is empty"));
  }
  if (records[0].config_hash != ConfigHash(config)) {
    spdlog::warn("eval: records were produced under config {}, current "
                 "config hashes to {}",
                 records[0].config_hash, ConfigHash(config));
  }
  DMIA_ASSIGN_OR_RETURN(std::vector<EvalReport> reports,
                        EvaluateAll(records, config.eval.fpr_targets));
  DMIA_RETURN_IF_ERROR(EmitReport(reports, config.output_dir));
  DMIA_RETURN_IF_ERROR(
      EmitPlots(records, config.output_dir, config.eval.histogram_bins));
  for (const EvalReport& r : reports) {
    spdlog::info("eval: {:<22} AUC {:.4f} ASR {:.4f}", r.attack_tag, r.auc,
                 r.asr);
  }
  return absl::OkStatus();
}

absl::StatusOr<SweepAxis> ParseSweepAxis(absl::string_view name) {
  for (SweepAxis axis : {SweepAxis::kAttackT, SweepAxis::kSigma, SweepAxis::kK,
                         SweepAxis::kStrideM, SweepAxis::kMetric}) {
    if (name == SweepAxisName(axis)) return axis;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "sweep axis '", name, "' (attack_t | sigma | k | stride_m | metric)"));
}

absl::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kAttackT:
      return "attack_t";
    case SweepAxis::kSigma:
      return "sigma";
    case SweepAxis::kK:
      return "k";
    case SweepAxis::kStrideM:
      return "stride_m";
    case SweepAxis::kMetric:
      return "metric";
  }
  return "unknown";
}

absl::StatusOr<RunConfig> WithSweepValue(const RunConfig& config,
                                         SweepAxis axis,
                                         absl::string_view value) {
  RunConfig out = config;
  const std::string field = absl::StrCat("attack.", SweepAxisName(axis));
  auto bad_value = [&](absl::string_view what) {
    return absl::InvalidArgumentError(
        absl::StrCat(field, ": sweep value '", value, "' ", what));
  };
  int int_value = 0;
  switch (axis) {
    case SweepAxis::kSigma:
      if (!absl::SimpleAtod(value, &out.attack.sigma)) {
        return bad_value("is not a number");
      }
      break;
    case SweepAxis::kMetric: {
      auto metric = ParseAggregationMetric(value);
      if (!metric.ok()) return bad_value("is not a metric");
      out.attack.metric = *metric;
      break;
    }
    case SweepAxis::kAttackT:
    case SweepAxis::kK:
    case SweepAxis::kStrideM:
      if (!absl::SimpleAtoi(value, &int_value)) {
        return bad_value("is not an integer");
      }
      (axis == SweepAxis::kAttackT ? out.attack.attack_t
       : axis == SweepAxis::kK     ? out.attack.k
                                   : out.attack.stride_m) = int_value;
      break;
  }
  DMIA_RETURN_IF_ERROR(ValidateConfig(out));
  return out;
}

absl::Status CmdSweep(const RunConfig& config, SweepAxis axis,
                      const std::vector<std::string>& values) {
  DMIA_RETURN_IF_ERROR(ValidateConfig(config));
  if (values.empty()) {
    return absl::InvalidArgumentError("sweep: no values given");
  }
  std::vector<SweepPoint> points;
  for (const std::string& value : values) {
    DMIA_ASSIGN_OR_RETURN(RunConfig point_config,
                          WithSweepValue(config, axis, value));
    SweepPoint& p = points.emplace_back();
    p.value = value;
    p.hash = ConfigHash(point_config);
    p.config = std::move(point_config);
  }

  DMIA_ASSIGN_OR_RETURN(NoiseSchedule schedule, BuildSchedule(config));
  const RunPaths paths = PathsFor(config.output_dir);
  DMIA_ASSIGN_OR_RETURN(LabeledData data, LoadInputs(paths));
  DMIA_ASSIGN_OR_RETURN(MlpPredictor model, LoadModelFor(paths, data));

  const std::string axis_name(SweepAxisName(axis));
  const fs::path sweep_dir =
      fs::path(config.output_dir) / absl::StrCat("sweep_", axis_name);
  DMIA_RETURN_IF_ERROR(EnsureDir(sweep_dir.string()));
  auto point_dir = [&](const SweepPoint& p) {
    return (sweep_dir / absl::StrCat(axis_name, "=", p.value)).string();
  };
  if (config.parallel) {
    std::vector<std::thread> workers;
    for (SweepPoint& p : points) {
      workers.emplace_back([&, &p = p] {
        p.status = RunSweepPoint(schedule, model, data, point_dir(p), p);
      });
    }
    for (std::thread& w : workers) w.join();
  } else {
    for (SweepPoint& p : points) {
      p.status = RunSweepPoint(schedule, model, data, point_dir(p), p);
    }
  }
  for (const SweepPoint& p : points) DMIA_RETURN_IF_ERROR(p.status);

  std::vector<std::string> header = {"axis", "value", "attack_tag", "auc",
                                     "asr", "tau"};
  for (double fpr : config.eval.fpr_targets) {
    header.push_back(absl::StrFormat("tpr_at_fpr_%g", fpr));
  }
  header.insert(header.end(), {"mean_queries", "config_hash"});
  std::string csv = absl::StrCat(absl::StrJoin(header, ","), "\n");
  Series auc{"AUC", {}};
  Series asr{"ASR", {}};
  for (const SweepPoint& p : points) {
    const EvalReport& r = p.report;
    std::vector<std::string> row = {
        axis_name, p.value, r.attack_tag,
        absl::StrFormat("%.17g", r.auc), absl::StrFormat("%.17g", r.asr),
        absl::StrFormat("%.17g", r.tau)};
    for (double fpr : config.eval.fpr_targets) {
      row.push_back(absl::StrFormat("%.17g", r.tpr_at_fpr.at(fpr)));
    }
    row.push_back(absl::StrFormat("%.17g", r.mean_queries));
    row.push_back(p.hash);
    absl::StrAppend(&csv, absl::StrJoin(row, ","), "\n");
    auc.ys.push_back(r.auc);
    asr.ys.push_back(r.asr);
    spdlog::info("sweep: {}={} AUC {:.4f} ASR {:.4f}", axis_name, p.value,
                 r.auc, r.asr);
  }
  DMIA_RETURN_IF_ERROR(
      internal::WriteFile((sweep_dir / "sweep.csv").string(), csv));
  const Series series[] = {auc, asr};
  return internal::WriteFile(
      (sweep_dir / "sweep.svg").string(),
      TagSvg(LineChartSvg(absl::StrCat("Attack performance vs ", axis_name),
                          axis_name, "score", values, series),
             ConfigHash(config)));
}

absl::Status MissingCheckpointError(const std::string& path) {
  absl::Status status = absl::NotFoundError(
      absl::StrCat("checkpoint ", path, " not found; run `dmia train` first"));
  status.SetPayload(kMissingCheckpointPayload, absl::Cord(path));
  return status;
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
      return 2;
    case absl::StatusCode::kNotFound:
      return status.GetPayload(kMissingCheckpointPayload).has_value() ? 3 : 4;
    case absl::StatusCode::kPermissionDenied:
      return 5;
    case absl::StatusCode::kDataLoss:
      return 6;
    case absl::StatusCode::kOutOfRange:
      return 7;
    case absl::StatusCode::kAborted:
      return 8;
    case absl::StatusCode::kFailedPrecondition:
      return 9;
    default:
      return 1;
  }
}

}  // namespace dmia
