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

#ifndef DMIA_REPORT_H_
#define DMIA_REPORT_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"
#include "dmia/evaluation.h"

namespace dmia {

// Standalone SVG renderers. Output depends only on the inputs (fixed number
// formatting, no timestamps), so identical inputs give identical bytes.

struct NamedCurve {
  std::string name;
  std::vector<RocPoint> points;
};
std::string RocSvg(std::span<const NamedCurve> curves);

// Member vs non-member score histograms for one attack.
std::string HistogramSvg(absl::string_view title,
                         std::span<const ScoredRecord> records,
                         int bins = 30);

struct Series {
  std::string name;
  std::vector<double> ys;
};
// Line chart over categorical x positions (sweep values, metric names).
std::string LineChartSvg(absl::string_view title, absl::string_view x_label,
                         absl::string_view y_label,
                         std::span<const std::string> x_ticks,
                         std::span<const Series> series);

// Writes <dir>/report.json and <dir>/report.txt.
// Embeds the config hash as a <desc> element right after the root tag.
std::string TagSvg(std::string svg, absl::string_view config_hash);

absl::Status EmitReport(std::span<const EvalReport> reports,
                        const std::string& dir);
// Writes <dir>/roc.svg and one <dir>/hist_<tag>.svg per attack tag.
absl::Status EmitPlots(std::span<const ScoredRecord> records,
                       const std::string& dir, int histogram_bins = 30);

nlohmann::json ReportsToJson(std::span<const EvalReport> reports);

}  // namespace dmia

#endif  // DMIA_REPORT_H_
