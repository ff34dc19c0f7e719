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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "porl/error.h"
#include "porl/harness.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;

// Hash of the config document, or "-" when it cannot be read.
std::string HashOf(const std::string& config_path) {
  if (config_path.empty()) return "-";
  try {
    porl::Json j = porl::ReadJsonFile(config_path);
    if (j.is_object()) j.erase("output_dir");
    return porl::ConfigHash(j);
  } catch (const std::exception&) {
    return "-";
  }
}

void PrintSummary(const porl::RunReport& report) {
  for (const porl::SummaryRow& r : report.summary) {
    std::cout << "  " << r.metric << " = " << porl::FormatDouble(r.mean)
              << " +- " << porl::FormatDouble(r.se) << " (n=" << r.n << ")\n";
  }
  for (const std::string& w : report.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
}

int RunCommand(const std::string& config_path) {
  const porl::ExperimentConfig config = porl::LoadExperimentConfig(config_path);
  const porl::RunReport report = porl::Run(config);
  std::cout << "config " << report.config_hash << " -> "
            << config.output_dir.string() << '\n';
  PrintSummary(report);
  return kExitOk;
}

int SweepCommand(const std::string& config_path, const std::string& axis,
                 const std::string& values) {
  const porl::ExperimentConfig config = porl::LoadExperimentConfig(config_path);
  const std::vector<double> grid = porl::ParseValueList(values);
  const porl::SweepResult result = porl::Sweep(config, axis, grid);
  std::cout << "sweep over " << result.axis << " (" << result.metric
            << ") -> " << result.table_path.string() << '\n';
  for (const porl::SweepPoint& p : result.points) {
    const porl::SummaryRow& m = p.report.metric(result.metric);
    std::cout << "  " << result.axis << '=' << porl::FormatDouble(p.axis_value)
              << ": " << porl::FormatDouble(m.mean) << " +- "
              << porl::FormatDouble(m.se) << '\n';
    for (const std::string& w : p.report.warnings) {
      std::cerr << "warning: " << w << '\n';
    }
  }
  return kExitOk;
}

int CrossPlayCommand(const std::string& game_spec,
                     const std::vector<std::string>& policy_paths,
                     const std::string& output) {
  const porl::MatrixGame game =
      porl::LoadMatrixGame(porl::ParseGameSpecString(game_spec));
  std::vector<porl::NamedPolicy> policies;
  for (const std::string& p : policy_paths) {
    policies.push_back(porl::LoadNamedPolicy(p));
  }
  const auto table = porl::CrossPlayReport(game, policies);
  if (output.empty()) {
    porl::WriteCrossPlayCsv(std::cout, table);
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw porl::ConfigError("cannot write '" + output + "'");
    porl::WriteCrossPlayCsv(out, table);
  }
  return kExitOk;
}

int PlotCommand(const std::string& input, const std::string& output,
                const porl::PlotOptions& options) {
  std::ifstream in(input);
  if (!in) throw porl::ConfigError("cannot read '" + input + "'");
  std::ostringstream svg;
  porl::WriteSvgPlot(in, svg, options);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw porl::ConfigError("cannot write '" + output + "'");
  out << svg.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized-leader policy optimization dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string axis;
  std::string values;
  std::string game_spec;
  std::vector<std::string> policy_paths;
  std::string output;
  std::string input;
  porl::PlotOptions plot;

  CLI::App* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config_path, "Experiment JSON")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one config parameter");
  sweep->add_option("--config", config_path, "Experiment JSON")->required();
  sweep->add_option("--axis", axis, "Parameter to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  CLI::App* cross = app.add_subcommand("crossplay", "Pairwise cross-play table");
  cross->add_option("--game", game_spec, "Game name[:k=v,...] or JSON path")
      ->required();
  cross->add_option("--policies", policy_paths, "Joint-policy JSON files")
      ->required();
  cross->add_option("--output", output, "CSV path (stdout when omitted)");

  CLI::App* plot_cmd = app.add_subcommand("plot", "SVG line chart of a CSV");
  plot_cmd->add_option("--input", input, "CSV file")->required();
  plot_cmd->add_option("--output", output, "SVG file")->required();
  plot_cmd->add_option("--title", plot.title, "Chart title");
  plot_cmd->add_option("--columns", plot.columns, "Series to draw");
  plot_cmd->add_flag("--log-y", plot.log_y, "Logarithmic y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return RunCommand(config_path);
    if (*sweep) return SweepCommand(config_path, axis, values);
    if (*cross) return CrossPlayCommand(game_spec, policy_paths, output);
    if (*plot_cmd) return PlotCommand(input, output, plot);
  } catch (const porl::ConvergenceError& e) {
    std::cerr << "error [config " << HashOf(config_path) << "]: " << e.what()
              << '\n';
    return kExitConvergence;
  } catch (const porl::ConfigError& e) {
    std::cerr << "config error [config " << HashOf(config_path)
              << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const porl::ModelError& e) {
    std::cerr << "config error [config " << HashOf(config_path)
              << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error [config " << HashOf(config_path) << "]: " << e.what()
              << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
