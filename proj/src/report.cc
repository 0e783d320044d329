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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "binary_io.h"
#include "dmia/status.h"

namespace dmia {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f"};

std::string Escape(absl::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) { return absl::StrFormat("%.2f", v); }

const char* Color(std::size_t i) {
  return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

// Plot frame mapping data ranges onto the drawing area.
struct Frame {
  double x_min, x_max, y_min, y_max;

  double X(double v) const {
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    return kLeft + (v - x_min) / span * (kWidth - kLeft - kRight);
  }
  double Y(double v) const {
    const double span = y_max > y_min ? y_max - y_min : 1.0;
    return kHeight - kBottom - (v - y_min) / span * (kHeight - kTop - kBottom);
  }
};

std::string Header(absl::string_view title) {
  return absl::StrCat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"", Num(kWidth),
      "\" height=\"", Num(kHeight), "\" viewBox=\"0 0 ", Num(kWidth), " ",
      Num(kHeight), "\" font-family=\"sans-serif\" font-size=\"12\">\n",
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      "<text x=\"", Num(kWidth / 2), "\" y=\"24\" text-anchor=\"middle\" "
      "font-size=\"15\">", Escape(title), "</text>\n");
}

std::string Axes(const Frame& f, absl::string_view x_label,
                 absl::string_view y_label, int y_ticks) {
  std::string out = absl::StrCat(
      "<rect x=\"", Num(kLeft), "\" y=\"", Num(kTop), "\" width=\"",
      Num(kWidth - kLeft - kRight), "\" height=\"",
      Num(kHeight - kTop - kBottom),
      "\" fill=\"none\" stroke=\"black\"/>\n");
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = f.y_min + (f.y_max - f.y_min) * i / y_ticks;
    absl::StrAppend(&out, "<text x=\"", Num(kLeft - 6), "\" y=\"",
                    Num(f.Y(v) + 4), "\" text-anchor=\"end\">",
                    absl::StrFormat("%.3g", v), "</text>\n");
  }
  absl::StrAppend(&out, "<text x=\"", Num((kLeft + kWidth - kRight) / 2),
                  "\" y=\"", Num(kHeight - 15), "\" text-anchor=\"middle\">",
                  Escape(x_label), "</text>\n");
  absl::StrAppend(&out, "<text transform=\"translate(18,",
                  Num((kTop + kHeight - kBottom) / 2),
                  ") rotate(-90)\" text-anchor=\"middle\">", Escape(y_label),
                  "</text>\n");
  return out;
}

std::string Legend(std::span<const std::string> names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    absl::StrAppend(&out, "<rect x=\"", Num(kWidth - kRight + 12), "\" y=\"",
                    Num(y - 9), "\" width=\"12\" height=\"12\" fill=\"",
                    Color(i), "\"/>\n<text x=\"",
                    Num(kWidth - kRight + 30), "\" y=\"", Num(y + 1), "\">",
                    Escape(names[i]), "</text>\n");
  }
  return out;
}

std::string Polyline(const Frame& f, std::span<const double> xs,
                     std::span<const double> ys, const char* color) {
  std::string points;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!points.empty()) points += ' ';
    absl::StrAppend(&points, Num(f.X(xs[i])), ",", Num(f.Y(ys[i])));
  }
  return absl::StrCat("<polyline fill=\"none\" stroke=\"", color,
                      "\" stroke-width=\"2\" points=\"", points, "\"/>\n");
}

}  // namespace

std::string RocSvg(std::span<const NamedCurve> curves) {
  const Frame f{0.0, 1.0, 0.0, 1.0};
  std::string out = Header("ROC");
  absl::StrAppend(&out, Axes(f, "false positive rate", "true positive rate", 5));
  absl::StrAppend(&out, "<line x1=\"", Num(f.X(0)), "\" y1=\"", Num(f.Y(0)),
                  "\" x2=\"", Num(f.X(1)), "\" y2=\"", Num(f.Y(1)),
                  "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const RocPoint& p : curves[i].points) {
      xs.push_back(p.fpr);
      ys.push_back(p.tpr);
    }
    absl::StrAppend(&out, Polyline(f, xs, ys, Color(i)));
    names.push_back(curves[i].name);
  }
  absl::StrAppend(&out, Legend(names), "</svg>\n");
  return out;
}

std::string HistogramSvg(absl::string_view title,
                         std::span<const ScoredRecord> records, int bins) {
  bins = std::max(bins, 1);
  double lo = 0.0;
  double hi = 1.0;
  if (!records.empty()) {
    lo = hi = records[0].score;
    for (const ScoredRecord& r : records) {
      lo = std::min(lo, r.score);
      hi = std::max(hi, r.score);
    }
    if (hi == lo) hi = lo + 1.0;
  }
  std::vector<int> members(bins, 0);
  std::vector<int> nonmembers(bins, 0);
  for (const ScoredRecord& r : records) {
    int b = static_cast<int>((r.score - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    (r.is_member ? members : nonmembers)[b] += 1;
  }
  int peak = 1;
  for (int b = 0; b < bins; ++b) {
    peak = std::max({peak, members[b], nonmembers[b]});
  }
  const Frame f{lo, hi, 0.0, static_cast<double>(peak)};
  std::string out = Header(absl::StrCat("Score histogram: ", title));
  absl::StrAppend(&out, Axes(f, "membership score", "count", 4));
  const double bin_width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double x0 = f.X(lo + bin_width * b);
    const double w = f.X(lo + bin_width * (b + 1)) - x0;
    for (int side = 0; side < 2; ++side) {
      const int count = side == 0 ? members[b] : nonmembers[b];
      if (count == 0) continue;
      absl::StrAppend(&out, "<rect x=\"", Num(x0), "\" y=\"", Num(f.Y(count)),
                      "\" width=\"", Num(w), "\" height=\"",
                      Num(f.Y(0) - f.Y(count)), "\" fill=\"", Color(side),
                      "\" fill-opacity=\"0.5\"/>\n");
    }
  }
  const std::string names[] = {"member", "non-member"};
  absl::StrAppend(&out, Legend(names), "</svg>\n");
  return out;
}

std::string LineChartSvg(absl::string_view title, absl::string_view x_label,
                         absl::string_view y_label,
                         std::span<const std::string> x_ticks,
                         std::span<const Series> series) {
  double lo = 0.0;
  double hi = 1.0;
  bool first = true;
  for (const Series& s : series) {
    for (double y : s.ys) {
      if (first) {
        lo = hi = y;
        first = false;
      }
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  const double n = static_cast<double>(std::max<std::size_t>(x_ticks.size(), 2));
  const Frame f{0.0, n - 1.0, lo - pad, hi + pad};
  std::string out = Header(title);
  absl::StrAppend(&out, Axes(f, x_label, y_label, 5));
  for (std::size_t i = 0; i < x_ticks.size(); ++i) {
    absl::StrAppend(&out, "<text x=\"", Num(f.X(static_cast<double>(i))),
                    "\" y=\"", Num(kHeight - kBottom + 16),
                    "\" text-anchor=\"middle\">", Escape(x_ticks[i]),
                    "</text>\n");
  }
  std::vector<std::string> names;
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < series[s].ys.size(); ++i) {
      xs.push_back(static_cast<double>(i));
    }
    absl::StrAppend(&out, Polyline(f, xs, series[s].ys, Color(s)));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      absl::StrAppend(&out, "<circle cx=\"", Num(f.X(xs[i])), "\" cy=\"",
                      Num(f.Y(series[s].ys[i])), "\" r=\"3\" fill=\"",
                      Color(s), "\"/>\n");
    }
    names.push_back(series[s].name);
  }
  absl::StrAppend(&out, Legend(names), "</svg>\n");
  return out;
}

nlohmann::json ReportsToJson(std::span<const EvalReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const EvalReport& r : reports) arr.push_back(ReportToJson(r));
  return nlohmann::json{
      {"config_hash", reports.empty() ? "" : reports[0].config_hash},
      {"reports", arr}};
}

std::string TagSvg(std::string svg, absl::string_view config_hash) {
  if (config_hash.empty()) return svg;
  const std::size_t eol = svg.find('\n');
  if (eol == std::string::npos) return svg;
  svg.insert(eol + 1,
             absl::StrCat("<desc>config_hash ", Escape(config_hash), "</desc>\n"));
  return svg;
}

absl::Status EmitReport(std::span<const EvalReport> reports,
                        const std::string& dir) {
  if (reports.empty()) return EvalDegenerateError("no reports to emit");
  const std::filesystem::path base(dir);
  DMIA_RETURN_IF_ERROR(internal::WriteFile(
      (base / "report.json").string(), ReportsToJson(reports).dump(2) + "\n"));
  return internal::WriteFile((base / "report.txt").string(),
                             ReportsToText(reports));
}

absl::Status EmitPlots(std::span<const ScoredRecord> records,
                       const std::string& dir, int histogram_bins) {
  if (records.empty()) return EvalDegenerateError("no records to plot");
  std::map<std::string, std::vector<ScoredRecord>> by_tag;
  for (const ScoredRecord& r : records) by_tag[r.attack_tag].push_back(r);
  std::vector<NamedCurve> curves;
  const std::filesystem::path base(dir);
  for (const auto& [tag, group] : by_tag) {
    DMIA_ASSIGN_OR_RETURN(std::vector<RocPoint> curve, RocCurve(group));
    curves.push_back({tag, std::move(curve)});
    DMIA_RETURN_IF_ERROR(internal::WriteFile(
        (base / absl::StrCat("hist_", tag, ".svg")).string(),
        TagSvg(HistogramSvg(tag, group, histogram_bins),
               records[0].config_hash)));
  }
  return internal::WriteFile((base / "roc.svg").string(),
                             TagSvg(RocSvg(curves), records[0].config_hash));
}

}  // namespace dmia
