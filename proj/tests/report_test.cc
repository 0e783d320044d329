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

#include "dmia/report.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dmia/evaluation.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "status_matchers.h"

namespace dmia {
namespace {

using ::dmia::testing::IsOk;
using ::dmia::testing::StatusIs;
using ::testing::HasSubstr;
using ::testing::StartsWith;
using ::testing::EndsWith;

std::vector<ScoredRecord> SampleRecords(const std::string& tag) {
  std::vector<ScoredRecord> out;
  for (int i = 0; i < 40; ++i) {
    ScoredRecord r;
    r.sample_id = i;
    r.is_member = i % 2 == 0;
    r.score = (i % 7) * 0.3 + (r.is_member ? 0.5 : 0.0);
    r.queries = 5;
    r.attack_tag = tag;
    r.metric = "mse";
    r.config_hash = "0123456789abcdef";
    out.push_back(r);
  }
  return out;
}

int CountOccurrences(const std::string& haystack, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path FreshDir(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(SvgTest, RocIsDeterministicAndComplete) {
  const auto records = SampleRecords("a");
  std::vector<NamedCurve> curves = {{"a<b>", *RocCurve(records)}};
  const std::string svg = RocSvg(curves);
  EXPECT_EQ(svg, RocSvg(curves));
  EXPECT_THAT(svg, StartsWith("<svg xmlns=\"http://www.w3.org/2000/svg\""));
  EXPECT_THAT(svg, EndsWith("</svg>\n"));
  EXPECT_THAT(svg, HasSubstr("a&lt;b&gt;"));
  EXPECT_EQ(CountOccurrences(svg, "<polyline"), 1);
}

TEST(SvgTest, HistogramDrawsOneBarPerNonEmptyBin) {
  std::vector<ScoredRecord> records(3);
  records[0].score = 0.0;
  records[0].is_member = true;
  records[1].score = 1.0;
  records[2].score = 1.0;
  const std::string svg = HistogramSvg("h", records, 4);
  // Member bar in bin 0, non-member bar in the last bin.
  EXPECT_EQ(CountOccurrences(svg, "fill-opacity=\"0.5\""), 2);
  EXPECT_EQ(svg, HistogramSvg("h", records, 4));
}

TEST(SvgTest, LineChartMarksEveryPoint) {
  const std::vector<std::string> ticks = {"0.01", "0.1", "1"};
  const std::vector<Series> series = {{"auc", {0.6, 0.8, 0.5}},
                                      {"asr", {0.55, 0.7, 0.5}}};
  const std::string svg = LineChartSvg("t", "x", "y", ticks, series);
  EXPECT_EQ(CountOccurrences(svg, "<circle"), 6);
  EXPECT_EQ(CountOccurrences(svg, "<polyline"), 2);
}

TEST(SvgTest, TagInsertsDescriptionAfterRoot) {
  const std::string svg = "<svg>\n<rect/>\n</svg>\n";
  EXPECT_EQ(TagSvg(svg, "abc"),
            "<svg>\n<desc>config_hash abc</desc>\n<rect/>\n</svg>\n");
  EXPECT_EQ(TagSvg(svg, ""), svg);
}

TEST(EmitTest, WritesReportAndPlotsReproducibly) {
  auto records = SampleRecords("x");
  const auto more = SampleRecords("y");
  records.insert(records.end(), more.begin(), more.end());
  const auto reports = *EvaluateAll(records);
  const auto first = FreshDir("emit_first");
  const auto second = FreshDir("emit_second");
  for (const auto& dir : {first, second}) {
    ASSERT_THAT(EmitReport(reports, dir.string()), IsOk());
    ASSERT_THAT(EmitPlots(records, dir.string()), IsOk());
  }
  for (const char* name : {"report.json", "report.txt", "roc.svg",
                           "hist_x.svg", "hist_y.svg"}) {
    const std::string a = Slurp(first / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, Slurp(second / name)) << name;
  }
  EXPECT_THAT(Slurp(first / "roc.svg"),
              HasSubstr("<desc>config_hash 0123456789abcdef</desc>"));
  const auto j = nlohmann::json::parse(Slurp(first / "report.json"));
  ASSERT_EQ(j["reports"].size(), 2u);
  EXPECT_EQ(*ReportFromJson(j["reports"][1]), reports[1]);
}

TEST(EmitTest, Errors) {
  EXPECT_THAT(EmitReport({}, ::testing::TempDir()),
              StatusIs(absl::StatusCode::kFailedPrecondition));
  EXPECT_THAT(EmitPlots({}, ::testing::TempDir()),
              StatusIs(absl::StatusCode::kFailedPrecondition));
  const auto records = SampleRecords("x");
  const auto reports = *EvaluateAll(records);
  EXPECT_THAT(EmitReport(reports, "/nonexistent/dir"),
              StatusIs(absl::StatusCode::kPermissionDenied));
}

}  // namespace
}  // namespace dmia
