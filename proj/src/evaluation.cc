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
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "dmia/status.h"

namespace dmia {
namespace {

// Distinct scores in descending order with per-group class counts.
struct ScoreGroup {
  double score;
  std::int64_t positives;
  std::int64_t negatives;
};

struct GroupedScores {
  std::vector<ScoreGroup> groups;
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

absl::StatusOr<GroupedScores> GroupScores(
    std::span<const ScoredRecord> records) {
  GroupedScores out;
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(records.size());
  for (const ScoredRecord& r : records) {
    if (!std::isfinite(r.score)) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite score for sample ", r.sample_id));
    }
    sorted.emplace_back(r.score, r.is_member);
    (r.is_member ? out.positives : out.negatives) += 1;
  }
  if (out.positives == 0 || out.negatives == 0) {
    return EvalDegenerateError(absl::StrCat(
        "evaluation needs both classes; got ", out.positives, " members and ",
        out.negatives, " non-members"));
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [score, member] : sorted) {
    if (out.groups.empty() || out.groups.back().score != score) {
      out.groups.push_back({score, 0, 0});
    }
    (member ? out.groups.back().positives : out.groups.back().negatives) += 1;
  }
  return out;
}

std::string FprKey(double fpr) { return absl::StrFormat("%g", fpr); }

}  // namespace

nlohmann::json RecordToJson(const ScoredRecord& record) {
  return nlohmann::json{{"sample_id", record.sample_id},
                        {"is_member", record.is_member},
                        {"score", record.score},
                        {"metric", record.metric},
                        {"queries", record.queries},
                        {"config_hash", record.config_hash},
                        {"attack_tag", record.attack_tag}};
}

absl::StatusOr<ScoredRecord> RecordFromJson(const nlohmann::json& j) {
  ScoredRecord r;
  try {
    r.sample_id = j.at("sample_id").get<std::uint64_t>();
    r.is_member = j.at("is_member").get<bool>();
    if (!j.at("score").is_number()) {
      return absl::InvalidArgumentError("record score is not a number");
    }
    r.score = j.at("score").get<double>();
    r.metric = j.at("metric").get<std::string>();
    r.queries = j.at("queries").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.attack_tag = j.at("attack_tag").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed scored record: ", e.what()));
  }
  return r;
}

std::string RecordsToJsonLines(std::span<const ScoredRecord> records) {
  std::string out;
  for (const ScoredRecord& r : records) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

absl::StatusOr<std::vector<ScoredRecord>> RecordsFromJsonLines(
    absl::string_view text) {
  std::vector<ScoredRecord> out;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrCat("records line ", line_no, " is not valid JSON"));
    }
    DMIA_ASSIGN_OR_RETURN(ScoredRecord r, RecordFromJson(j));
    out.push_back(std::move(r));
  }
  return out;
}

absl::StatusOr<std::vector<RocPoint>> RocCurve(
    std::span<const ScoredRecord> records) {
  DMIA_ASSIGN_OR_RETURN(GroupedScores g, GroupScores(records));
  std::vector<RocPoint> curve;
  curve.reserve(g.groups.size() + 2);
  curve.push_back({0.0, 0.0});
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (const ScoreGroup& group : g.groups) {
    tp += group.positives;
    fp += group.negatives;
    curve.push_back({static_cast<double>(fp) / g.negatives,
                     static_cast<double>(tp) / g.positives});
  }
  // The lowest distinct score admits every record, so the walk already ends
  // at (1, 1).
  return curve;
}

absl::StatusOr<double> Auc(std::span<const ScoredRecord> records) {
  DMIA_ASSIGN_OR_RETURN(GroupedScores g, GroupScores(records));
  // Twice the area in units of 1/(P*N): each group adds
  // negatives * (2 * tp_before + positives).
  std::int64_t doubled = 0;
  std::int64_t tp = 0;
  for (const ScoreGroup& group : g.groups) {
    doubled += group.negatives * (2 * tp + group.positives);
    tp += group.positives;
  }
  return static_cast<double>(doubled) /
         static_cast<double>(2 * g.positives * g.negatives);
}

absl::StatusOr<AsrResult> Asr(std::span<const ScoredRecord> records) {
  DMIA_ASSIGN_OR_RETURN(GroupedScores g, GroupScores(records));
  const std::int64_t p = g.positives;
  const std::int64_t n = g.negatives;
  // Candidates in ascending tau. Balanced accuracy * 2PN = tp*N + tn*P.
  // tau = -inf: everything is a member.
  std::int64_t best = p * n;
  double best_tau = -std::numeric_limits<double>::infinity();
  // Walking groups from the lowest score up, the threshold just above group
  // i rejects that group and everything below it.
  std::int64_t tp = p;
  std::int64_t tn = 0;
  for (std::size_t i = g.groups.size(); i-- > 0;) {
    tp -= g.groups[i].positives;
    tn += g.groups[i].negatives;
    const double tau =
        i == 0 ? std::numeric_limits<double>::infinity()
               : g.groups[i].score +
                     (g.groups[i - 1].score - g.groups[i].score) / 2.0;
    const std::int64_t value = tp * n + tn * p;
    if (value > best) {
      best = value;
      best_tau = tau;
    }
  }
  return AsrResult{static_cast<double>(best) / static_cast<double>(2 * p * n),
                   best_tau};
}

absl::StatusOr<double> TprAtFpr(std::span<const ScoredRecord> records,
                                double fpr_target) {
  DMIA_ASSIGN_OR_RETURN(std::vector<RocPoint> curve, RocCurve(records));
  double best = 0.0;
  for (const RocPoint& point : curve) {
    if (point.fpr <= fpr_target) best = std::max(best, point.tpr);
  }
  return best;
}

absl::StatusOr<EvalReport> Evaluate(std::span<const ScoredRecord> records,
                                    std::span<const double> fpr_targets) {
  if (records.empty()) {
    return EvalDegenerateError("no records to evaluate");
  }
  EvalReport report;
  report.attack_tag = records[0].attack_tag;
  report.config_hash = records[0].config_hash;
  double total_queries = 0.0;
  for (const ScoredRecord& r : records) {
    if (r.attack_tag != report.attack_tag) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mixed attack tags: ", report.attack_tag, " vs ", r.attack_tag));
    }
    if (r.config_hash != report.config_hash) {
      return absl::InvalidArgumentError(absl::StrCat(
          "records carry differing config hashes: ", report.config_hash,
          " vs ", r.config_hash));
    }
    (r.is_member ? report.n_members : report.n_nonmembers) += 1;
    total_queries += static_cast<double>(r.queries);
  }
  report.mean_queries = total_queries / static_cast<double>(records.size());
  DMIA_ASSIGN_OR_RETURN(report.auc, Auc(records));
  DMIA_ASSIGN_OR_RETURN(AsrResult asr, Asr(records));
  report.asr = asr.asr;
  report.tau = asr.tau;
  for (double target : fpr_targets) {
    DMIA_ASSIGN_OR_RETURN(report.tpr_at_fpr[target], TprAtFpr(records, target));
  }
  return report;
}

absl::StatusOr<std::vector<EvalReport>> EvaluateAll(
    std::span<const ScoredRecord> records,
    std::span<const double> fpr_targets) {
  if (records.empty()) return EvalDegenerateError("no records to evaluate");
  std::map<std::string, std::vector<ScoredRecord>> by_tag;
  for (const ScoredRecord& r : records) {
    if (r.config_hash != records[0].config_hash) {
      return absl::InvalidArgumentError(absl::StrCat(
          "refusing to mix records with config hashes ",
          records[0].config_hash, " and ", r.config_hash));
    }
    by_tag[r.attack_tag].push_back(r);
  }
  std::vector<EvalReport> reports;
  for (const auto& [tag, group] : by_tag) {
    DMIA_ASSIGN_OR_RETURN(EvalReport report, Evaluate(group, fpr_targets));
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace {

nlohmann::json EncodeTau(double tau) {
  if (std::isinf(tau)) return tau > 0 ? "+inf" : "-inf";
  return tau;
}

absl::StatusOr<double> DecodeTau(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "+inf") return std::numeric_limits<double>::infinity();
  if (j == "-inf") return -std::numeric_limits<double>::infinity();
  return absl::InvalidArgumentError("report tau is neither a number nor +-inf");
}

}  // namespace

nlohmann::json ReportToJson(const EvalReport& report) {
  nlohmann::json tpr = nlohmann::json::object();
  for (const auto& [fpr, value] : report.tpr_at_fpr) tpr[FprKey(fpr)] = value;
  return nlohmann::json{{"attack_tag", report.attack_tag},
                        {"asr", report.asr},
                        {"tau", EncodeTau(report.tau)},
                        {"auc", report.auc},
                        {"tpr_at_fpr", tpr},
                        {"n_members", report.n_members},
                        {"n_nonmembers", report.n_nonmembers},
                        {"mean_queries", report.mean_queries},
                        {"config_hash", report.config_hash}};
}

absl::StatusOr<EvalReport> ReportFromJson(const nlohmann::json& j) {
  EvalReport report;
  try {
    report.attack_tag = j.at("attack_tag").get<std::string>();
    report.asr = j.at("asr").get<double>();
    DMIA_ASSIGN_OR_RETURN(report.tau, DecodeTau(j.at("tau")));
    report.auc = j.at("auc").get<double>();
    for (const auto& [key, value] : j.at("tpr_at_fpr").items()) {
      report.tpr_at_fpr[std::stod(key)] = value.get<double>();
    }
    report.n_members = j.at("n_members").get<std::size_t>();
    report.n_nonmembers = j.at("n_nonmembers").get<std::size_t>();
    report.mean_queries = j.at("mean_queries").get<double>();
    report.config_hash = j.value("config_hash", "");
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed report: ", e.what()));
  }
  return report;
}

std::string ReportsToText(std::span<const EvalReport> reports) {
  std::vector<std::string> fpr_headers;
  std::vector<double> fprs;
  for (const EvalReport& r : reports) {
    for (const auto& [fpr, unused] : r.tpr_at_fpr) {
      if (std::find(fprs.begin(), fprs.end(), fpr) == fprs.end()) {
        fprs.push_back(fpr);
      }
    }
  }
  std::sort(fprs.rbegin(), fprs.rend());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"attack", "queries", "ASR", "AUC"};
  for (double fpr : fprs) {
    header.push_back(absl::StrFormat("TPR@%g%%FPR", fpr * 100.0));
  }
  rows.push_back(header);
  for (const EvalReport& r : reports) {
    std::vector<std::string> row = {r.attack_tag,
                                    absl::StrFormat("%.2f", r.mean_queries),
                                    absl::StrFormat("%.4f", r.asr),
                                    absl::StrFormat("%.4f", r.auc)};
    for (double fpr : fprs) {
      auto it = r.tpr_at_fpr.find(fpr);
      row.push_back(it == r.tpr_at_fpr.end()
                        ? "-"
                        : absl::StrFormat("%.2f%%", it->second * 100.0));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c == 0) {
        out += absl::StrFormat("%-*s", static_cast<int>(widths[c]), rows[i][c]);
      } else {
        out += absl::StrFormat("  %*s", static_cast<int>(widths[c]), rows[i][c]);
      }
    }
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w + 2;
      out += std::string(total - 2, '-') + '\n';
    }
  }
  if (!reports.empty() && !reports[0].config_hash.empty()) {
    absl::StrAppend(&out, "config_hash: ", reports[0].config_hash, "\n");
  }
  return out;
}

}  // namespace dmia
