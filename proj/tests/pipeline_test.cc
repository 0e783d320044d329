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

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dmia/config.h"
#include "dmia/denoiser.h"
#include "dmia/evaluation.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "status_matchers.h"

namespace dmia {
namespace {

namespace fs = std::filesystem;

using ::dmia::testing::IsOk;
using ::dmia::testing::StatusIs;
using ::testing::HasSubstr;
using ::testing::StartsWith;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "pipeline" / name;
  fs::remove_all(dir);
  return dir;
}

RunConfig SmallConfig(const fs::path& dir) {
  RunConfig c;
  c.master_seed = 11;
  c.output_dir = dir.string();
  c.dataset.kind = SyntheticKind::kGaussianMixture2d;
  c.dataset.count = 64;
  c.model.hidden_dims = {32, 32};
  c.train.epochs = 200;
  c.train.batch_size = 16;
  return c;
}

absl::Status RunAll(const RunConfig& c) {
  if (auto s = CmdGen(c); !s.ok()) return s;
  if (auto s = CmdTrain(c); !s.ok()) return s;
  if (auto s = CmdAttack(c); !s.ok()) return s;
  return CmdEval(c);
}

TEST(PurposeStreamTest, DistinctAndReproducible) {
  std::set<std::uint64_t> firsts;
  for (auto p : {RngPurpose::kData, RngPurpose::kSplit, RngPurpose::kInit,
                 RngPurpose::kTrain, RngPurpose::kAttack,
                 RngPurpose::kBaseline}) {
    firsts.insert(PurposeStream(5, p).NextU64());
    EXPECT_EQ(PurposeStream(5, p).NextU64(), PurposeStream(5, p).NextU64());
  }
  EXPECT_EQ(firsts.size(), 6u);
  EXPECT_NE(PurposeStream(5, RngPurpose::kData).NextU64(),
            PurposeStream(6, RngPurpose::kData).NextU64());
}

TEST(PipelineTest, PathsAndTags) {
  const RunPaths p = PathsFor("out");
  EXPECT_EQ(p.dataset, "out/dataset.dset");
  EXPECT_EQ(p.split, "out/split.json");
  EXPECT_EQ(p.checkpoint, "out/model.ckpt");
  EXPECT_EQ(p.loss_trace, "out/loss_trace.json");
  EXPECT_EQ(p.records, "out/records.jsonl");
  EXPECT_EQ(AggregationTag(AggregationMetric::kMse), "aggregation-mse");
}

TEST(ExitCodeTest, OneCodePerErrorClass) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), 0);
  EXPECT_EQ(ExitCodeFor(absl::InternalError("x")), 1);
  EXPECT_EQ(ExitCodeFor(absl::InvalidArgumentError("x")), 2);
  EXPECT_EQ(ExitCodeFor(MissingCheckpointError("m.ckpt")), 3);
  EXPECT_EQ(ExitCodeFor(absl::NotFoundError("x")), 4);
  EXPECT_EQ(ExitCodeFor(absl::PermissionDeniedError("x")), 5);
  EXPECT_EQ(ExitCodeFor(absl::DataLossError("x")), 6);
  EXPECT_EQ(ExitCodeFor(absl::OutOfRangeError("x")), 7);
  EXPECT_EQ(ExitCodeFor(absl::AbortedError("x")), 8);
  EXPECT_EQ(ExitCodeFor(absl::FailedPreconditionError("x")), 9);
  EXPECT_THAT(MissingCheckpointError("m.ckpt"),
              StatusIs(absl::StatusCode::kNotFound, "m.ckpt"));
}

TEST(PipelineTest, DataGenerationRespectsSplit) {
  const RunConfig c = SmallConfig(FreshDir("unused"));
  const LabeledData data = *GenerateData(c);
  EXPECT_EQ(data.dataset.samples.size(), 64u);
  EXPECT_EQ(data.members.size(), 32u);
  EXPECT_EQ(std::count(data.is_member.begin(), data.is_member.end(), true),
            32);
  for (std::size_t i : data.split.member_indices) {
    EXPECT_TRUE(data.is_member[i]);
  }
  for (std::size_t i : data.split.nonmember_indices) {
    EXPECT_FALSE(data.is_member[i]);
  }
}

class EndToEndTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(FreshDir("e2e"));
    ASSERT_THAT(RunAll(SmallConfig(*dir_)), IsOk());
  }
  static void TearDownTestSuite() { delete dir_; }

  static fs::path* dir_;
};

fs::path* EndToEndTest::dir_ = nullptr;

TEST_F(EndToEndTest, WritesEveryArtifact) {
  for (const char* name :
       {"dataset.dset", "split.json", "model.ckpt", "loss_trace.json",
        "records.jsonl", "report.json", "report.txt", "roc.svg",
        "hist_aggregation-mse.svg", "hist_naive-loss.svg",
        "hist_secmi-style.svg"}) {
    EXPECT_TRUE(fs::exists(*dir_ / name)) << name;
  }
  const std::string hash = ConfigHash(SmallConfig(*dir_));
  const auto split = nlohmann::json::parse(Slurp(*dir_ / "split.json"));
  EXPECT_EQ(split["config_hash"], hash);
  EXPECT_EQ(split["seed"], 11);
  const auto trace = nlohmann::json::parse(Slurp(*dir_ / "loss_trace.json"));
  EXPECT_EQ(trace["loss"].size(), 200u);
  EXPECT_LT(trace["loss"].back().get<double>(),
            trace["loss"].front().get<double>());
}

TEST_F(EndToEndTest, RecordsCarryQueriesAndHash) {
  const auto records = *RecordsFromJsonLines(Slurp(*dir_ / "records.jsonl"));
  ASSERT_EQ(records.size(), 3u * 64u);
  const std::string hash = ConfigHash(SmallConfig(*dir_));
  for (const ScoredRecord& r : records) {
    EXPECT_EQ(r.config_hash, hash);
    if (r.attack_tag == "aggregation-mse") {
      EXPECT_EQ(r.queries, 5u);
    } else if (r.attack_tag == "naive-loss") {
      EXPECT_EQ(r.queries, 1u);
    } else {
      EXPECT_EQ(r.attack_tag, "secmi-style");
      EXPECT_EQ(r.queries, 12u);
    }
  }
  const auto report = nlohmann::json::parse(Slurp(*dir_ / "report.json"));
  ASSERT_EQ(report["reports"].size(), 3u);
  EXPECT_EQ(report["reports"][0]["attack_tag"], "aggregation-mse");
  EXPECT_EQ(report["reports"][0]["mean_queries"], 5.0);
  EXPECT_EQ(report["reports"][0]["n_members"], 32);
}

TEST_F(EndToEndTest, RerunIsBitIdentical) {
  const fs::path other = FreshDir("e2e_rerun");
  ASSERT_THAT(RunAll(SmallConfig(other)), IsOk());
  for (const char* name : {"dataset.dset", "split.json", "model.ckpt",
                           "loss_trace.json", "records.jsonl", "report.json",
                           "report.txt", "roc.svg"}) {
    EXPECT_EQ(Slurp(*dir_ / name), Slurp(other / name)) << name;
  }
}

TEST_F(EndToEndTest, EvalRerunIsByteIdentical) {
  const std::string report = Slurp(*dir_ / "report.json");
  const std::string roc = Slurp(*dir_ / "roc.svg");
  ASSERT_THAT(CmdEval(SmallConfig(*dir_)), IsOk());
  EXPECT_EQ(Slurp(*dir_ / "report.json"), report);
  EXPECT_EQ(Slurp(*dir_ / "roc.svg"), roc);
}

TEST_F(EndToEndTest, MembersHaveLowerTrainingLoss) {
  const RunConfig c = SmallConfig(*dir_);
  const LabeledData data = *GenerateData(c);
  const MlpPredictor model = *LoadCheckpoint((*dir_ / "model.ckpt").string());
  const NoiseSchedule schedule = *BuildSchedule(c);
  std::vector<Vector> nonmembers;
  for (std::size_t i : data.split.nonmember_indices) {
    nonmembers.push_back(data.dataset.samples[i]);
  }
  // Average over many (t, eps) draws; the same stream for both sets.
  double member_loss = 0.0;
  double nonmember_loss = 0.0;
  constexpr int kRounds = 200;
  for (int r = 0; r < kRounds; ++r) {
    SeededRng a(99, r);
    SeededRng b(99, r);
    member_loss += *TrainingLoss(model, schedule, data.members, a);
    nonmember_loss += *TrainingLoss(model, schedule, nonmembers, b);
  }
  EXPECT_LT(member_loss, nonmember_loss);
}

TEST_F(EndToEndTest, SweepWritesOneReportPerPointAndParallelAgrees) {
  const std::vector<std::string> values = {"0.01", "0.05", "0.1", "0.3", "1"};
  const fs::path serial = FreshDir("sweep_serial");
  const fs::path parallel = FreshDir("sweep_parallel");
  for (const fs::path& d : {serial, parallel}) {
    fs::create_directories(d);
    for (const char* name : {"dataset.dset", "split.json", "model.ckpt"}) {
      fs::copy_file(*dir_ / name, d / name);
    }
  }
  RunConfig c = SmallConfig(serial);
  ASSERT_THAT(CmdSweep(c, SweepAxis::kSigma, values), IsOk());
  c = SmallConfig(parallel);
  c.parallel = true;
  ASSERT_THAT(CmdSweep(c, SweepAxis::kSigma, values), IsOk());

  const std::string csv = Slurp(serial / "sweep_sigma" / "sweep.csv");
  EXPECT_THAT(csv, StartsWith("axis,value,attack_tag,auc,asr,tau,"
                              "tpr_at_fpr_0.01,tpr_at_fpr_0.001,"
                              "mean_queries,config_hash\n"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(csv, Slurp(parallel / "sweep_sigma" / "sweep.csv"));
  for (const std::string& v : values) {
    const fs::path point = serial / "sweep_sigma" / ("sigma=" + v);
    EXPECT_TRUE(fs::exists(point / "report.json")) << v;
    EXPECT_EQ(Slurp(point / "records.jsonl"),
              Slurp(parallel / "sweep_sigma" / ("sigma=" + v) /
                    "records.jsonl"));
  }
  EXPECT_TRUE(fs::exists(serial / "sweep_sigma" / "sweep.svg"));
}

TEST(SweepTest, AxesAndValues) {
  for (auto axis : {SweepAxis::kAttackT, SweepAxis::kSigma, SweepAxis::kK,
                    SweepAxis::kStrideM, SweepAxis::kMetric}) {
    EXPECT_EQ(*ParseSweepAxis(SweepAxisName(axis)), axis);
  }
  EXPECT_THAT(ParseSweepAxis("beta"),
              StatusIs(absl::StatusCode::kInvalidArgument));
  const RunConfig c;
  EXPECT_EQ(WithSweepValue(c, SweepAxis::kSigma, "0.3")->attack.sigma, 0.3);
  EXPECT_EQ(WithSweepValue(c, SweepAxis::kK, "3")->attack.k, 3);
  EXPECT_EQ(WithSweepValue(c, SweepAxis::kMetric, "l1")->attack.metric,
            AggregationMetric::kL1);
  EXPECT_THAT(WithSweepValue(c, SweepAxis::kSigma, "x"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       "attack.sigma: sweep value 'x' is not a number"));
  EXPECT_THAT(WithSweepValue(c, SweepAxis::kK, "2.5"),
              StatusIs(absl::StatusCode::kInvalidArgument, "attack.k"));
  // Valid as a number but breaks the config invariants.
  EXPECT_THAT(WithSweepValue(c, SweepAxis::kK, "9"),
              StatusIs(absl::StatusCode::kInvalidArgument, "attack.attack_t"));
}

TEST(CommandErrorTest, MissingInputsMapToDistinctCodes) {
  const fs::path dir = FreshDir("errors");
  const RunConfig c = SmallConfig(dir);
  EXPECT_EQ(ExitCodeFor(CmdTrain(c)), 4);
  EXPECT_EQ(ExitCodeFor(CmdEval(c)), 4);
  ASSERT_THAT(CmdGen(c), IsOk());
  EXPECT_EQ(ExitCodeFor(CmdAttack(c)), 3);
  EXPECT_EQ(ExitCodeFor(CmdSweep(c, SweepAxis::kSigma, {"0.1"})), 3);
  // A checkpoint for the wrong input dimension.
  SeededRng rng(1, 0);
  ASSERT_THAT(SaveCheckpoint(*MlpPredictor::Create(3, {4}, rng),
                             (dir / "model.ckpt").string()),
              IsOk());
  EXPECT_THAT(CmdAttack(c),
              StatusIs(absl::StatusCode::kInvalidArgument, "input_dim"));
  // Truncated checkpoint.
  const std::string bytes = Slurp(dir / "model.ckpt");
  std::ofstream(dir / "model.ckpt", std::ios::binary)
      << bytes.substr(0, bytes.size() - 3);
  EXPECT_EQ(ExitCodeFor(CmdAttack(c)), 6);
  // Corrupt split manifest.
  std::ofstream(dir / "split.json") << "{\"member_indices\": [0]}";
  EXPECT_EQ(ExitCodeFor(CmdTrain(c)), 6);
  RunConfig bad = c;
  bad.attack.k = 1;
  EXPECT_THAT(CmdGen(bad), StatusIs(absl::StatusCode::kInvalidArgument,
                                    "attack.k"));
  RunConfig unwritable = c;
  unwritable.output_dir = "/proc/dmia_cannot_write_here";
  EXPECT_EQ(ExitCodeFor(CmdGen(unwritable)), 5);
}

}  // namespace
}  // namespace dmia
