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

#ifndef PORL_HARNESS_H_
#define PORL_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "porl/dynamics.h"
#include "porl/games.h"
#include "porl/json_io.h"
#include "porl/param_policy.h"
#include "porl/tabular_sg.h"
#include "porl/trajectory.h"

namespace porl {

// Game selection. Either a registry name with parameters or a JSON file.
//   matrix games:   "matching_pennies", "rock_paper_scissors"
//   kernel games:   BuiltinKernelNames(), discretized at `resolution` cells
//                   per axis
//   action values:  "quadratic", "linear" (param_policy solver only)
// A file holding "states" is a stochastic game, otherwise a matrix game.
struct GameSpec {
  std::string name;
  KernelParams params;
  int resolution = 32;
  std::filesystem::path path;
};

// {"name": ..., "params": {...}, "resolution": n} or {"path": ...}.
GameSpec ParseGameSpec(const Json& j, const std::filesystem::path& base_dir);
// "name", "name:key=value,key=value" or a path to a JSON file. Vector
// parameters use ';' between entries, e.g. "quadratic:center=0.3;-0.1".
GameSpec ParseGameSpecString(std::string_view text);

// Single-state continuous game for the parametric solver.
struct ContinuousGame {
  std::string name;
  QFunction q;
  std::size_t dim = 1;
};

using LoadedGame = std::variant<MatrixGame, TabularSG, ContinuousGame>;
LoadedGame LoadGame(const GameSpec& spec);
// LoadGame restricted to matrix and discretized kernel games.
MatrixGame LoadMatrixGame(const GameSpec& spec);

enum class SolverKind { kDynamics, kAlgorithm1, kParamPolicy };
std::string_view ToString(SolverKind kind);

struct ReferenceSpec {
  enum class Kind { kQre, kNone, kPath };
  Kind kind = Kind::kQre;
  std::filesystem::path path;
  // Solver budget for kQre: logit-iteration steps (matrix games) or value
  // sweeps (stochastic games). Unset values keep the solver defaults.
  std::optional<double> tol;
  std::optional<long> max_iters;
};

struct InitialSpec {
  enum class Kind { kUniform, kRandom, kExplicit };
  Kind kind = Kind::kUniform;
  // Standard deviation of the random logits (or of mu for param_policy).
  double scale = 1.0;
  // Inline policy for kExplicit; loaded from `path` when that is set.
  Json policy;
  std::filesystem::path path;
};

struct ParamSolverConfig {
  ParamTrainConfig train;
  // Cells per axis of the grid used for metrics and the reference.
  int resolution = 200;
};

// Experiment configuration. JSON schema (unknown keys are ConfigErrors):
// {
//   "name": label used in policy files (optional),
//   "game": GameSpec,
//   "solver": "dynamics" | "algorithm1" | "param_policy",
//   "dynamics":     {eta, alpha, alpha_floor_fraction, alpha_decay,
//                    decay_interval, rule, iterations, record_every},
//   "algorithm1":   {eta, alpha, eval_sweeps, improve_steps,
//                    outer_iterations, damping_tau, eval_tol,
//                    initial_state},
//   "param_policy": {eta, alpha, outer_iterations, steps_per_anchor,
//                    batch_size, learning_rate, resolution},
//   "reference": "qre" | "none" | {"path": ...} |
//                {"kind": "qre", "tol": t, "max_iters": n},
//   "reference_alpha": temperature of the qre reference (defaults to the
//                      solver's alpha),
//   "initial": {"kind": "uniform" | "random" | "explicit", "scale": s,
//               "path": ..., "policy": {...}},
//   "output_dir": path,
//   "seeds": [integers]
// }
// Relative paths resolve against the config file's directory.
struct ExperimentConfig {
  std::string name;
  GameSpec game;
  SolverKind solver = SolverKind::kDynamics;
  DynamicsConfig dynamics;
  Algorithm1Config algorithm1;
  int initial_state = 0;
  ParamSolverConfig param_policy;
  ReferenceSpec reference;
  std::optional<double> reference_alpha;
  InitialSpec initial;
  std::filesystem::path output_dir;
  std::vector<std::uint64_t> seeds;
  // The parsed source document and the directory relative paths resolve
  // against; sweeps patch `source` and re-parse it.
  Json source;
  std::filesystem::path base_dir;
};

ExperimentConfig ParseExperimentConfig(const Json& j,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string ConfigHash(const Json& j);

struct SummaryRow {
  std::string metric;
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
  bool operator==(const SummaryRow&) const = default;
};

struct RunReport {
  std::string config_hash;
  std::vector<std::filesystem::path> trajectory_paths;
  std::vector<std::filesystem::path> policy_paths;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;
  // Throws ValueError when the metric is absent.
  const SummaryRow& metric(std::string_view name) const;
};

// Result of one seed before anything is written.
struct SeedRun {
  std::uint64_t seed = 0;
  Trajectory trajectory;
  Json policy;
};

// Solves every seed without touching the output directory.
std::vector<SeedRun> ExecuteSeeds(const ExperimentConfig& config);

// Summary rows over the final iterate of every seed: final_kl_ref (when a
// reference exists), final_exploitability, final_value, final_entropy_p1,
// final_entropy_p2. Standard errors use the sample deviation over sqrt(n).
std::vector<SummaryRow> Summarize(std::span<const SeedRun> runs);

// Runs all seeds, then writes trajectory_seed<k>.csv, policy_seed<k>.json,
// summary.csv and report.json into config.output_dir. Nothing is written
// when any seed fails.
RunReport Run(const ExperimentConfig& config);

struct SweepPoint {
  double axis_value = 0.0;
  RunReport report;
};

struct SweepResult {
  std::string axis;
  // Summary metric tabulated per point: final_kl_ref when the runs carry a
  // reference, final_exploitability otherwise.
  std::string metric;
  std::vector<SweepPoint> points;
  std::filesystem::path table_path;
};

// Axes: any numeric key of the active solver section, "reference_alpha" and
// "resolution" (kernel games). Point k writes into
// <output_dir>/<axis>=<value>/ and the aggregate table goes to
// <output_dir>/sweep_<axis>.csv with header
// axis_value,final_metric_mean,final_metric_se.
SweepResult Sweep(const ExperimentConfig& base, std::string_view axis,
                  std::span<const double> values);
std::vector<std::string> SweepAxes(SolverKind solver);

// Parses "1,0.5,1e-3". Throws ConfigError on an empty or malformed list.
std::vector<double> ParseValueList(std::string_view text);

struct NamedPolicy {
  std::string name;
  JointPolicy policy;
};

// Reads a joint-policy file; the name falls back to the file stem.
NamedPolicy LoadNamedPolicy(const std::filesystem::path& path);

struct CrossPlayEntry {
  std::string row;
  std::string col;
  double score_mean = 0.0;
  bool operator==(const CrossPlayEntry&) const = default;
};

// Full pairwise table over distinct names (in first-appearance order).
// Policies sharing a name are averaged over all member pairs. On zero-sum
// games every pair must satisfy S[a, b] = -S[b, a] within 1e-10.
std::vector<CrossPlayEntry> CrossPlayReport(const MatrixGame& game,
                                            std::span<const NamedPolicy> policies);

// CSV readers and writers for the emitted tables. Readers throw ValueError
// on a bad header or row.
void WriteSummaryCsv(std::ostream& out, std::span<const SummaryRow> rows);
std::vector<SummaryRow> ReadSummaryCsv(std::istream& in);

struct SweepRow {
  double axis_value = 0.0;
  double mean = 0.0;
  double se = 0.0;
  bool operator==(const SweepRow&) const = default;
};
void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> ReadSweepCsv(std::istream& in);

void WriteCrossPlayCsv(std::ostream& out,
                       std::span<const CrossPlayEntry> entries);
std::vector<CrossPlayEntry> ReadCrossPlayCsv(std::istream& in);

// Everything `Run` wrote, read back from disk.
struct LoadedRun {
  Json report;
  std::vector<std::vector<TrajectoryPoint>> trajectories;
  std::vector<SummaryRow> summary;
};
LoadedRun LoadRunReport(const std::filesystem::path& output_dir);

struct PlotOptions {
  std::string title;
  bool log_y = false;
  // Columns to draw; empty means every column after the first.
  std::vector<std::string> columns;
  int width = 720;
  int height = 420;
};

// Line chart of a numeric CSV: the first column is x, the rest are series.
// Non-finite cells (and non-positive ones under log_y) are skipped.
void WriteSvgPlot(std::istream& csv, std::ostream& svg,
                  const PlotOptions& options = {});

// Worker count: PORL_DYN_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
unsigned WorkerCount();

// Calls fn(0..n-1) on up to WorkerCount() threads. When calls throw, the
// exception of the lowest index is rethrown after all workers finish.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace porl

#endif  // PORL_HARNESS_H_
