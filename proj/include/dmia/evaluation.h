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

#ifndef DMIA_EVALUATION_H_
#define DMIA_EVALUATION_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nlohmann/json.hpp"

namespace dmia {

struct ScoredRecord {
  std::uint64_t sample_id = 0;
  bool is_member = false;
  double score = 0.0;  // larger = more member-like
  std::uint64_t queries = 0;
  std::string attack_tag;
  std::string metric;  // aggregation metric, or the baseline name
  std::string config_hash;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

nlohmann::json RecordToJson(const ScoredRecord& record);
absl::StatusOr<ScoredRecord> RecordFromJson(const nlohmann::json& j);
// One compact JSON object per line.
std::string RecordsToJsonLines(std::span<const ScoredRecord> records);
absl::StatusOr<std::vector<ScoredRecord>> RecordsFromJsonLines(
    absl::string_view text);

// Membership decision: score >= tau.
inline bool Decide(double score, double tau) { return score >= tau; }

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// One point per distinct score (descending threshold), bracketed by (0,0)
// and (1,1). Needs at least one member and one non-member.
absl::StatusOr<std::vector<RocPoint>> RocCurve(
    std::span<const ScoredRecord> records);

// Trapezoidal area under RocCurve, accumulated in integer counts so it is
// the Mann-Whitney statistic (ties count one half) to the last bit.
absl::StatusOr<double> Auc(std::span<const ScoredRecord> records);

struct AsrResult {
  double asr = 0.5;
  double tau = 0.0;
};

// Best balanced accuracy over thresholds at +-inf and midpoints between
// adjacent distinct scores; ties go to the smallest tau.
absl::StatusOr<AsrResult> Asr(std::span<const ScoredRecord> records);

// TPR at the most permissive threshold with FPR <= fpr_target; no
// interpolation. 0 if no threshold qualifies.
absl::StatusOr<double> TprAtFpr(std::span<const ScoredRecord> records,
                                double fpr_target);

inline const std::vector<double>& DefaultFprTargets() {
  static const std::vector<double> targets = {0.01, 0.001};
  return targets;
}

struct EvalReport {
  std::string attack_tag;
  double asr = 0.5;
  double tau = 0.0;
  double auc = 0.5;
  std::map<double, double> tpr_at_fpr;
  std::size_t n_members = 0;
  std::size_t n_nonmembers = 0;
  double mean_queries = 0.0;
  std::string config_hash;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Records must share one attack_tag and one config_hash.
absl::StatusOr<EvalReport> Evaluate(
    std::span<const ScoredRecord> records,
    std::span<const double> fpr_targets = DefaultFprTargets());

// Groups by attack_tag (sorted) and evaluates each group. Refuses records
// with differing config hashes.
absl::StatusOr<std::vector<EvalReport>> EvaluateAll(
    std::span<const ScoredRecord> records,
    std::span<const double> fpr_targets = DefaultFprTargets());

nlohmann::json ReportToJson(const EvalReport& report);
absl::StatusOr<EvalReport> ReportFromJson(const nlohmann::json& j);

// Aligned-column comparison table, one row per report.
std::string ReportsToText(std::span<const EvalReport> reports);

}  // namespace dmia

#endif  // DMIA_EVALUATION_H_
