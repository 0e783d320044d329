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

#include "dmia/evaluation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dmia/numerics.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "status_matchers.h"

namespace dmia {
namespace {

using ::dmia::testing::StatusIs;
using ::testing::DoubleEq;
using ::testing::ElementsAre;
using ::testing::FieldsAre;
using ::testing::HasSubstr;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ScoredRecord> Make(std::vector<double> scores,
                               std::vector<bool> labels) {
  std::vector<ScoredRecord> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ScoredRecord r;
    r.sample_id = i;
    r.is_member = labels[i];
    r.score = scores[i];
    r.queries = 5;
    r.attack_tag = "t";
    r.metric = "mse";
    r.config_hash = "00000000deadbeef";
    out.push_back(r);
  }
  return out;
}

std::vector<ScoredRecord> RandomRecords(SeededRng& rng, std::size_t n,
                                        double separation, bool ties) {
  std::vector<double> scores;
  std::vector<bool> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const bool member = i % 2 == 0 || rng.NextUniform() < 0.2;
    double s = rng.NextGaussian() + (member ? separation : 0.0);
    if (ties) s = std::round(s * 2.0) / 2.0;
    scores.push_back(s);
    labels.push_back(member);
  }
  return Make(scores, labels);
}

// Pairwise Mann-Whitney statistic, ties counting one half.
double MannWhitney(const std::vector<ScoredRecord>& records) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& a : records) {
    if (!a.is_member) continue;
    for (const auto& b : records) {
      if (b.is_member) continue;
      pairs += 1.0;
      if (a.score > b.score) wins += 1.0;
      if (a.score == b.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Exhaustive balanced accuracy over every distinct threshold.
double BruteForceAsr(const std::vector<ScoredRecord>& records) {
  std::vector<double> taus = {kInf};
  for (const auto& r : records) taus.push_back(r.score);
  double best = 0.0;
  for (double tau : taus) {
    double tp = 0, p = 0, tn = 0, n = 0;
    for (const auto& r : records) {
      const bool yes = Decide(r.score, tau);
      if (r.is_member) {
        p += 1;
        tp += yes;
      } else {
        n += 1;
        tn += !yes;
      }
    }
    best = std::max(best, 0.5 * (tp / p + tn / n));
  }
  return best;
}

TEST(DecideTest, InclusiveThreshold) {
  EXPECT_TRUE(Decide(1.0, 1.0));
  EXPECT_TRUE(Decide(1.5, 1.0));
  EXPECT_FALSE(Decide(std::nextafter(1.0, 0.0), 1.0));
  EXPECT_TRUE(Decide(-1e300, -kInf));
  EXPECT_FALSE(Decide(1e300, kInf));
}

TEST(RocTest, HandExample) {
  const auto records = Make({0.9, 0.8, 0.7, 0.6}, {true, false, true, false});
  const auto curve = *RocCurve(records);
  EXPECT_THAT(curve, ElementsAre(FieldsAre(0.0, 0.0), FieldsAre(0.0, 0.5),
                                 FieldsAre(0.5, 0.5), FieldsAre(0.5, 1.0),
                                 FieldsAre(1.0, 1.0)));
  EXPECT_DOUBLE_EQ(*Auc(records), 0.75);
}

TEST(RocTest, TiesFormOneDiagonalStep) {
  const auto records = Make({1.0, 1.0, 1.0, 1.0}, {true, false, true, false});
  EXPECT_THAT(*RocCurve(records),
              ElementsAre(FieldsAre(0.0, 0.0), FieldsAre(1.0, 1.0)));
  EXPECT_DOUBLE_EQ(*Auc(records), 0.5);
}

TEST(RocTest, PerfectAndInvertedSeparation) {
  EXPECT_DOUBLE_EQ(*Auc(Make({3, 2, 1, 0}, {true, true, false, false})), 1.0);
  EXPECT_DOUBLE_EQ(*Auc(Make({3, 2, 1, 0}, {false, false, true, true})), 0.0);
}

TEST(RocTest, AucMatchesMannWhitney) {
  SeededRng rng(1, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto records = RandomRecords(rng, 20 + rng.NextBelow(180),
                                       rng.NextUniform(), trial % 2 == 0);
    EXPECT_NEAR(*Auc(records), MannWhitney(records), 1e-12);
  }
}

TEST(RocTest, CurveIsMonotoneAndEndsAtCorners) {
  SeededRng rng(2, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto records = RandomRecords(rng, 50, 0.7, trial % 3 == 0);
    const auto curve = *RocCurve(records);
    EXPECT_THAT(curve.front(), FieldsAre(0.0, 0.0));
    EXPECT_THAT(curve.back(), FieldsAre(1.0, 1.0));
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_GE(curve[i].fpr, curve[i - 1].fpr);
      EXPECT_GE(curve[i].tpr, curve[i - 1].tpr);
    }
  }
}

TEST(RocTest, LabelSwapComplementsAuc) {
  SeededRng rng(3, 0);
  for (int trial = 0; trial < 100; ++trial) {
    auto records = RandomRecords(rng, 60, 0.5, trial % 2 == 0);
    const double auc = *Auc(records);
    for (auto& r : records) r.is_member = !r.is_member;
    EXPECT_NEAR(*Auc(records), 1.0 - auc, 1e-12);
  }
}

TEST(RocTest, RejectsDegenerateInput) {
  EXPECT_THAT(Auc(Make({1, 2}, {true, true})),
              StatusIs(absl::StatusCode::kFailedPrecondition));
  EXPECT_THAT(RocCurve(Make({1, 2}, {false, false})),
              StatusIs(absl::StatusCode::kFailedPrecondition));
  EXPECT_THAT(Auc(Make({1, NAN}, {true, false})),
              StatusIs(absl::StatusCode::kInvalidArgument, "non-finite"));
}

TEST(AsrTest, HandExamples) {
  const AsrResult perfect = *Asr(Make({3, 2, 1, 0}, {true, true, false, false}));
  EXPECT_DOUBLE_EQ(perfect.asr, 1.0);
  EXPECT_DOUBLE_EQ(perfect.tau, 1.5);
  // Inverted scores: no threshold beats guessing; the smallest tau wins.
  const AsrResult inverted =
      *Asr(Make({3, 2, 1, 0}, {false, false, true, true}));
  EXPECT_DOUBLE_EQ(inverted.asr, 0.5);
  EXPECT_EQ(inverted.tau, -kInf);
  const AsrResult mixed = *Asr(Make({0.9, 0.8, 0.7, 0.6},
                                    {true, false, true, false}));
  EXPECT_DOUBLE_EQ(mixed.asr, 0.75);
  // 0.65 and 0.85 tie at 0.75; the smaller threshold is reported.
  EXPECT_DOUBLE_EQ(mixed.tau, 0.65);
}

TEST(AsrTest, MatchesBruteForceAndIsAtLeastHalf) {
  SeededRng rng(4, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto records = RandomRecords(rng, 10 + rng.NextBelow(100),
                                       rng.NextUniform() - 0.3, trial % 2 == 0);
    const AsrResult r = *Asr(records);
    EXPECT_GE(r.asr, 0.5);
    EXPECT_NEAR(r.asr, BruteForceAsr(records), 1e-12);
    // tau realizes the reported accuracy.
    double tp = 0, p = 0, tn = 0, n = 0;
    for (const auto& rec : records) {
      (rec.is_member ? p : n) += 1;
      if (rec.is_member && Decide(rec.score, r.tau)) tp += 1;
      if (!rec.is_member && !Decide(rec.score, r.tau)) tn += 1;
    }
    EXPECT_NEAR(0.5 * (tp / p + tn / n), r.asr, 1e-12);
  }
}

TEST(AsrTest, InvariantUnderMonotoneTransform) {
  SeededRng rng(5, 0);
  for (int trial = 0; trial < 100; ++trial) {
    auto records = RandomRecords(rng, 80, 0.8, trial % 2 == 0);
    const double asr = Asr(records)->asr;
    const double auc = *Auc(records);
    for (auto& r : records) r.score = std::exp(0.5 * r.score) - 3.0;
    EXPECT_DOUBLE_EQ(Asr(records)->asr, asr);
    EXPECT_DOUBLE_EQ(*Auc(records), auc);
  }
}

TEST(TprAtFprTest, CountsWithoutInterpolation) {
  // 1000 non-members spread over [0, 1); ten members above all of them,
  // ten members between the top 5 and the rest.
  std::vector<double> scores;
  std::vector<bool> labels;
  for (int i = 0; i < 1000; ++i) {
    scores.push_back(i / 1000.0);
    labels.push_back(false);
  }
  for (int i = 0; i < 10; ++i) {
    scores.push_back(2.0 + i);
    labels.push_back(true);
    scores.push_back(0.9945 - i * 1e-5);
    labels.push_back(true);
  }
  const auto records = Make(scores, labels);
  // FPR 0.001 admits one non-member (0.999): only the ten top members.
  EXPECT_DOUBLE_EQ(*TprAtFpr(records, 0.001), 0.5);
  // FPR 0.01 admits ten non-members, reaching below 0.9945.
  EXPECT_DOUBLE_EQ(*TprAtFpr(records, 0.01), 1.0);
  // Below one non-member's worth, nothing but the perfect head.
  EXPECT_DOUBLE_EQ(*TprAtFpr(records, 0.0), 0.5);
}

TEST(TprAtFprTest, NondecreasingInTarget) {
  SeededRng rng(6, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto records = RandomRecords(rng, 300, 1.0, trial % 2 == 0);
    double previous = 0.0;
    for (int step = 0; step <= 100; ++step) {
      const double tpr = *TprAtFpr(records, step / 100.0);
      EXPECT_GE(tpr, previous);
      previous = tpr;
    }
    EXPECT_EQ(previous, 1.0);
  }
}

TEST(EvaluateTest, FillsEveryField) {
  auto records = Make({0.9, 0.8, 0.7, 0.6}, {true, false, true, false});
  records[0].queries = 9;
  const EvalReport report = *Evaluate(records);
  EXPECT_EQ(report.attack_tag, "t");
  EXPECT_EQ(report.config_hash, "00000000deadbeef");
  EXPECT_EQ(report.n_members, 2u);
  EXPECT_EQ(report.n_nonmembers, 2u);
  EXPECT_DOUBLE_EQ(report.mean_queries, 6.0);
  EXPECT_DOUBLE_EQ(report.auc, 0.75);
  EXPECT_DOUBLE_EQ(report.asr, 0.75);
  EXPECT_EQ(report.tpr_at_fpr.size(), 2u);
  EXPECT_DOUBLE_EQ(report.tpr_at_fpr.at(0.01), 0.5);
}

TEST(EvaluateTest, Errors) {
  EXPECT_THAT(Evaluate({}), StatusIs(absl::StatusCode::kFailedPrecondition));
  EXPECT_THAT(EvaluateAll({}), StatusIs(absl::StatusCode::kFailedPrecondition));
  auto records = Make({1, 2}, {true, false});
  records[1].attack_tag = "other";
  EXPECT_THAT(Evaluate(records), StatusIs(absl::StatusCode::kInvalidArgument,
                                          "mixed attack tags"));
  records[1].attack_tag = "t";
  records[1].config_hash = "ffff";
  EXPECT_THAT(EvaluateAll(records),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(EvaluateTest, EvaluateAllGroupsByTag) {
  auto records = Make({3, 2, 1, 0, 3, 2, 1, 0},
                      {true, true, false, false, false, false, true, true});
  for (std::size_t i = 4; i < 8; ++i) records[i].attack_tag = "a";
  const auto reports = *EvaluateAll(records);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].attack_tag, "a");
  EXPECT_DOUBLE_EQ(reports[0].auc, 0.0);
  EXPECT_DOUBLE_EQ(reports[1].auc, 1.0);
}

TEST(SerializationTest, RecordRoundTrip) {
  SeededRng rng(7, 0);
  const auto records = RandomRecords(rng, 40, 0.3, false);
  const std::string text = RecordsToJsonLines(records);
  EXPECT_EQ(*RecordsFromJsonLines(text), records);
  const nlohmann::json j = RecordToJson(records[0]);
  for (const char* key : {"sample_id", "is_member", "score", "metric",
                          "queries", "config_hash", "attack_tag"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_THAT(RecordsFromJsonLines("{\"sample_id\": 1}\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "malformed"));
  EXPECT_THAT(RecordsFromJsonLines("{oops\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "line 1"));
}

TEST(SerializationTest, ReportRoundTripIncludingInfiniteTau) {
  auto report = *Evaluate(Make({3, 2, 1, 0}, {false, false, true, true}));
  ASSERT_EQ(report.tau, -kInf);
  const nlohmann::json j = ReportToJson(report);
  EXPECT_EQ(j["tau"], "-inf");
  EXPECT_TRUE(j["tpr_at_fpr"].contains("0.01"));
  EXPECT_TRUE(j["tpr_at_fpr"].contains("0.001"));
  for (const char* key : {"attack_tag", "asr", "tau", "auc", "tpr_at_fpr",
                          "n_members", "n_nonmembers", "mean_queries"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(*ReportFromJson(j), report);
  report.tau = 0.125;
  EXPECT_EQ(*ReportFromJson(nlohmann::json::parse(ReportToJson(report).dump())),
            report);
}

TEST(SerializationTest, TextTableListsEveryAttack) {
  auto records = Make({3, 2, 1, 0}, {true, true, false, false});
  const auto reports = *EvaluateAll(records);
  const std::string text = ReportsToText(reports);
  EXPECT_THAT(text, HasSubstr("TPR@1%FPR"));
  EXPECT_THAT(text, HasSubstr("TPR@0.1%FPR"));
  EXPECT_THAT(text, HasSubstr("1.0000"));
  EXPECT_THAT(text, HasSubstr("config_hash: 00000000deadbeef"));
}

}  // namespace
}  // namespace dmia
