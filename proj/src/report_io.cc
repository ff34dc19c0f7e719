// Copyright 2026 The PORL Dynamics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "porl/error.h"
#include "porl/harness.h"

namespace porl {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  for (std::size_t pos; (pos = line.find(',')) != std::string_view::npos;) {
    fields.emplace_back(line.substr(0, pos));
    line.remove_prefix(pos + 1);
  }
  fields.emplace_back(line);
  return fields;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Reads the header and the rows of a CSV with exactly `header` as first line.
std::vector<std::vector<std::string>> ReadTable(std::istream& in,
                                                std::string_view header,
                                                std::string_view what) {
  std::string line;
  if (!std::getline(in, line) || StripCr(line) != header) {
    throw ValueError(std::string(what) + " CSV: unexpected header");
  }
  const std::size_t width = SplitCsvLine(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != width) {
      throw ValueError(std::string(what) + " CSV: expected " +
                       std::to_string(width) + " fields in '" + line + "'");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

long ParseLong(const std::string& text) {
  const double v = ParseDouble(text);
  if (v != std::floor(v)) throw ValueError("expected an integer, got " + text);
  return static_cast<long>(v);
}

std::string XmlEscape(std::string_view s) {
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

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string TickLabel(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void WriteSummaryCsv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "metric,mean,se,n\n";
  for (const SummaryRow& r : rows) {
    out << r.metric << ',' << FormatDouble(r.mean) << ',' << FormatDouble(r.se)
        << ',' << r.n << '\n';
  }
}

std::vector<SummaryRow> ReadSummaryCsv(std::istream& in) {
  std::vector<SummaryRow> rows;
  for (auto& f : ReadTable(in, "metric,mean,se,n", "summary")) {
    rows.push_back({f[0], ParseDouble(f[1]), ParseDouble(f[2]), ParseLong(f[3])});
  }
  return rows;
}

void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "axis_value,final_metric_mean,final_metric_se\n";
  for (const SweepRow& r : rows) {
    out << FormatDouble(r.axis_value) << ',' << FormatDouble(r.mean) << ','
        << FormatDouble(r.se) << '\n';
  }
}

std::vector<SweepRow> ReadSweepCsv(std::istream& in) {
  std::vector<SweepRow> rows;
  for (auto& f : ReadTable(in, "axis_value,final_metric_mean,final_metric_se",
                           "sweep")) {
    rows.push_back({ParseDouble(f[0]), ParseDouble(f[1]), ParseDouble(f[2])});
  }
  return rows;
}

void WriteCrossPlayCsv(std::ostream& out,
                       std::span<const CrossPlayEntry> entries) {
  out << "row_alg,col_alg,score_mean\n";
  for (const CrossPlayEntry& e : entries) {
    out << e.row << ',' << e.col << ',' << FormatDouble(e.score_mean) << '\n';
  }
}

std::vector<CrossPlayEntry> ReadCrossPlayCsv(std::istream& in) {
  std::vector<CrossPlayEntry> rows;
  for (auto& f : ReadTable(in, "row_alg,col_alg,score_mean", "cross-play")) {
    rows.push_back({f[0], f[1], ParseDouble(f[2])});
  }
  return rows;
}

LoadedRun LoadRunReport(const fs::path& output_dir) {
  LoadedRun run;
  run.report = ReadJsonFile(output_dir / "report.json");
  if (!run.report.contains("trajectories") ||
      !run.report.at("trajectories").is_array()) {
    throw ValueError("report.json: missing trajectory list");
  }
  for (const Json& name : run.report.at("trajectories")) {
    std::ifstream in(output_dir / name.get<std::string>());
    if (!in) throw ValueError("missing trajectory " + name.get<std::string>());
    run.trajectories.push_back(ReadTrajectoryCsv(in));
  }
  std::ifstream summary(output_dir / "summary.csv");
  if (!summary) throw ValueError("missing summary.csv");
  run.summary = ReadSummaryCsv(summary);
  return run;
}

void WriteSvgPlot(std::istream& csv, std::ostream& svg,
                  const PlotOptions& options) {
  std::string line;
  if (!std::getline(csv, line)) throw ValueError("plot: empty CSV");
  const std::vector<std::string> header = SplitCsvLine(StripCr(line));
  if (header.size() < 2) throw ValueError("plot: need at least two columns");

  std::vector<std::size_t> series;
  if (options.columns.empty()) {
    for (std::size_t k = 1; k < header.size(); ++k) series.push_back(k);
  } else {
    for (const std::string& name : options.columns) {
      auto it = std::find(header.begin() + 1, header.end(), name);
      if (it == header.end()) throw ValueError("plot: no column '" + name + "'");
      series.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(csv, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw ValueError("plot: ragged row '" + line + "'");
    }
    std::vector<double> row;
    for (const std::string& f : fields) row.push_back(ParseDouble(f));
    rows.push_back(std::move(row));
  }

  auto usable = [&](double y) {
    return std::isfinite(y) && (!options.log_y || y > 0.0);
  };
  auto ty = [&](double y) { return options.log_y ? std::log10(y) : y; };
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& row : rows) {
    if (!std::isfinite(row[0])) continue;
    for (std::size_t k : series) {
      if (!usable(row[k])) continue;
      x_lo = std::min(x_lo, row[0]);
      x_hi = std::max(x_hi, row[0]);
      y_lo = std::min(y_lo, ty(row[k]));
      y_hi = std::max(y_hi, ty(row[k]));
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0; x_hi = 1.0; y_lo = 0.0; y_hi = 1.0;
  }
  if (x_hi == x_lo) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi == y_lo) { y_lo -= 0.5; y_hi += 0.5; }

  const double w = options.width;
  const double h = options.height;
  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = w - left - right;
  const double ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#ff7f0e", "#9467bd", "#8c564b"};
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
      << options.width << ' ' << options.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << Fixed(w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">"
        << XmlEscape(options.title) << "</text>\n";
  }
  svg << "<rect x=\"" << Fixed(left) << "\" y=\"" << Fixed(top) << "\" width=\""
      << Fixed(pw) << "\" height=\"" << Fixed(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_lo + (x_hi - x_lo) * k / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * k / 4.0;
    svg << "<text x=\"" << Fixed(px(fx)) << "\" y=\"" << Fixed(h - bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << TickLabel(fx) << "</text>\n";
    svg << "<text x=\"" << Fixed(left - 6) << "\" y=\"" << Fixed(py(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">"
        << TickLabel(options.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  svg << "<text x=\"" << Fixed(left + pw / 2) << "\" y=\"" << Fixed(h - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << XmlEscape(header[0]) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::size_t k = series[s];
    const char* color = kColors[s % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& row : rows) {
      if (!std::isfinite(row[0]) || !usable(row[k])) continue;
      if (!first) svg << ' ';
      svg << Fixed(px(row[0])) << ',' << Fixed(py(ty(row[k])));
      first = false;
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(s);
    svg << "<line x1=\"" << Fixed(w - right + 10) << "\" y1=\"" << Fixed(ly - 4)
        << "\" x2=\"" << Fixed(w - right + 30) << "\" y2=\"" << Fixed(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << Fixed(w - right + 36) << "\" y=\"" << Fixed(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << XmlEscape(header[k]) << "</text>\n";
  }
  svg << "</svg>\n";
  if (!svg) throw ValueError("plot: write failed");
}

}  // namespace porl
