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
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "porl/equilibrium.h"
#include "porl/error.h"
#include "porl/harness.h"

namespace porl {

namespace fs = std::filesystem;

unsigned WorkerCount() {
  if (const char* env = std::getenv("PORL_DYN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(WorkerCount(), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

// A config with its game and reference resolved.
struct Prepared {
  Prepared(const ExperimentConfig* c, LoadedGame g)
      : config(c), game(std::move(g)) {}

  const ExperimentConfig* config;
  LoadedGame game;
  std::optional<JointPolicy> reference;
  std::optional<StatePolicy> state_reference;
  std::optional<TabularSG> stochastic_game;
  // Parametric solver: metric grid, action values on it, reference density.
  SupportPtr grid;
  std::vector<double> grid_values;
  std::optional<Density> grid_reference;
};

double SolverAlpha(const ExperimentConfig& c) {
  switch (c.solver) {
    case SolverKind::kDynamics:
      return c.dynamics.alpha;
    case SolverKind::kAlgorithm1:
      return c.algorithm1.alpha;
    case SolverKind::kParamPolicy:
      return c.param_policy.train.alpha;
  }
  return 0.0;
}

double ReferenceAlpha(const ExperimentConfig& c) {
  const double alpha = c.reference_alpha.value_or(SolverAlpha(c));
  if (!(alpha > 0.0)) {
    throw ConfigError(
        "reference \"qre\" needs a positive temperature; set reference_alpha "
        "when the solver runs at alpha = 0");
  }
  return alpha;
}

// Zero-sum matrix game on unit atoms as a one-state, undiscounted game.
TabularSG AsStochasticGame(const MatrixGame& g) {
  if (!g.zero_sum()) {
    throw ConfigError("algorithm1 needs a zero-sum game");
  }
  for (Player p : {Player::kOne, Player::kTwo}) {
    for (const Cell& c : g.support(p)->cells()) {
      if (c.measure != 1.0) {
        throw ConfigError(
            "algorithm1 accepts matrix games on unit atoms, not kernel grids");
      }
    }
  }
  const Matrix& m = g.payoff_1();
  const std::vector<double> rewards(m.data().begin(), m.data().end());
  return TabularSG(1, static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                   std::vector<double>(m.rows() * m.cols(), 1.0), rewards, 0.0,
                   {}, g.r_max());
}

StatePolicy StatePolicyFromJson(const Json& j) {
  RequireKeys(j, {"name", "states"}, "state policy");
  if (!j.contains("states") || !j.at("states").is_array()) {
    throw ConfigError("state policy: missing 'states' array");
  }
  StatePolicy pi;
  for (const Json& s : j.at("states")) pi.push_back(JointPolicyFromJson(s));
  return pi;
}

Prepared Prepare(const ExperimentConfig& c) {
  Prepared p(&c, LoadGame(c.game));
  const bool want_qre = c.reference.kind == ReferenceSpec::Kind::kQre;
  const bool from_file = c.reference.kind == ReferenceSpec::Kind::kPath;
  switch (c.solver) {
    case SolverKind::kDynamics: {
      const auto* g = std::get_if<MatrixGame>(&p.game);
      if (g == nullptr) {
        throw ConfigError("the dynamics solver needs a matrix or kernel game");
      }
      if (want_qre) {
        QreOptions options;
        if (c.reference.tol) options.tol = *c.reference.tol;
        if (c.reference.max_iters) options.max_iters = *c.reference.max_iters;
        p.reference = QreSolve(*g, ReferenceAlpha(c), options).policy;
      }
      if (from_file) p.reference = JointPolicyFromJson(ReadJsonFile(c.reference.path));
      break;
    }
    case SolverKind::kAlgorithm1: {
      if (const auto* g = std::get_if<MatrixGame>(&p.game)) {
        p.stochastic_game = AsStochasticGame(*g);
      } else if (const auto* sg = std::get_if<TabularSG>(&p.game)) {
        p.stochastic_game = *sg;
      } else {
        throw ConfigError("the algorithm1 solver needs a stochastic or matrix game");
      }
      if (c.initial_state >= p.stochastic_game->num_states()) {
        throw ConfigError("algorithm1: initial_state out of range");
      }
      if (want_qre) {
        p.state_reference =
            SolveRegularizedEquilibrium(*p.stochastic_game, ReferenceAlpha(c),
                                        c.reference.tol.value_or(1e-12),
                                        c.reference.max_iters.value_or(100000))
                .policy;
      }
      if (from_file) {
        p.state_reference = StatePolicyFromJson(ReadJsonFile(c.reference.path));
      }
      break;
    }
    case SolverKind::kParamPolicy: {
      const auto* g = std::get_if<ContinuousGame>(&p.game);
      if (g == nullptr) {
        throw ConfigError("the param_policy solver needs a q-function game");
      }
      const int res = c.param_policy.resolution;
      if (std::pow(static_cast<double>(res), static_cast<double>(g->dim)) > 1e6) {
        throw ConfigError("param_policy: metric grid exceeds 1e6 cells");
      }
      const std::vector<double> lows(g->dim, -1.0);
      const std::vector<double> highs(g->dim, 1.0);
      const std::vector<int> cells(g->dim, res);
      p.grid = Support::Grid(lows, highs, cells);
      for (const Cell& cell : p.grid->cells()) {
        p.grid_values.push_back(g->q.value(cell.center));
      }
      if (want_qre) {
        p.grid_reference = SoftOptimal(p.grid, p.grid_values, ReferenceAlpha(c));
      }
      if (from_file) {
        p.grid_reference = DensityFromJson(ReadJsonFile(c.reference.path));
        RequireSameSupport(p.grid_reference->support(), p.grid,
                           "param_policy reference");
      }
      break;
    }
  }
  return p;
}

Density RandomDensity(const SupportPtr& support, double scale,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> logits(support->size());
  for (double& l : logits) l = scale * normal(rng);
  return Density::FromLogits(support, logits);
}

Json LoadInitialJson(const InitialSpec& spec) {
  return spec.path.empty() ? spec.policy : ReadJsonFile(spec.path);
}

SeedRun RunDynamicsSeed(const Prepared& p, std::uint64_t seed) {
  const ExperimentConfig& c = *p.config;
  const MatrixGame& g = std::get<MatrixGame>(p.game);
  std::optional<JointPolicy> initial;
  std::mt19937_64 rng(seed);
  switch (c.initial.kind) {
    case InitialSpec::Kind::kUniform:
      break;
    case InitialSpec::Kind::kRandom: {
      Density first = RandomDensity(g.support(Player::kOne), c.initial.scale, rng);
      initial = JointPolicy{std::move(first),
                            RandomDensity(g.support(Player::kTwo),
                                          c.initial.scale, rng)};
      break;
    }
    case InitialSpec::Kind::kExplicit:
      initial = JointPolicyFromJson(LoadInitialJson(c.initial));
      break;
  }
  DynamicsConfig dyn = c.dynamics;
  dyn.seed = seed;
  SeedRun run{seed, RunDynamics(g, dyn, p.reference, initial), {}};
  run.policy = JointPolicyToJson(*run.trajectory.final_policy, c.name);
  return run;
}

SeedRun RunAlgorithm1Seed(const Prepared& p, std::uint64_t seed) {
  const ExperimentConfig& c = *p.config;
  const TabularSG& sg = *p.stochastic_game;
  std::optional<StatePolicy> initial;
  std::mt19937_64 rng(seed);
  switch (c.initial.kind) {
    case InitialSpec::Kind::kUniform:
      break;
    case InitialSpec::Kind::kRandom: {
      StatePolicy pi;
      for (int s = 0; s < sg.num_states(); ++s) {
        Density first = RandomDensity(sg.support(Player::kOne), c.initial.scale, rng);
        pi.push_back({std::move(first), RandomDensity(sg.support(Player::kTwo),
                                                      c.initial.scale, rng)});
      }
      initial = std::move(pi);
      break;
    }
    case InitialSpec::Kind::kExplicit:
      initial = StatePolicyFromJson(LoadInitialJson(c.initial));
      break;
  }
  Algorithm1Result res =
      RunAlgorithm1(sg, c.algorithm1, p.state_reference, c.initial_state, initial);
  Json states = Json::array();
  for (const JointPolicy& pi : res.policy) states.push_back(JointPolicyToJson(pi));
  SeedRun run{seed, std::move(res.trajectory), {}};
  run.policy = {{"name", c.name}, {"states", states}};
  return run;
}

TrajectoryPoint MeasureParam(const Prepared& p, const SquashedGaussian& policy,
                             long t) {
  const Density d = DiscretizePolicy(policy, p.grid);
  TrajectoryPoint point;
  point.t = t;
  point.kl_to_reference = p.grid_reference
                              ? Kl(*p.grid_reference, d)
                              : std::numeric_limits<double>::quiet_NaN();
  point.value = Inner(d, p.grid_values);
  point.exploitability =
      std::max(0.0, *std::max_element(p.grid_values.begin(), p.grid_values.end()) -
                        point.value);
  point.entropy_1 = Entropy(d);
  point.entropy_2 = 0.0;
  return point;
}

SeedRun RunParamSeed(const Prepared& p, std::uint64_t seed) {
  const ExperimentConfig& c = *p.config;
  const ContinuousGame& g = std::get<ContinuousGame>(p.game);
  SquashedGaussian initial{std::vector<double>(g.dim, 0.0),
                           std::vector<double>(g.dim, 0.0)};
  std::mt19937_64 rng(seed);
  switch (c.initial.kind) {
    case InitialSpec::Kind::kUniform:
      break;
    case InitialSpec::Kind::kRandom: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (double& m : initial.mu) m = c.initial.scale * normal(rng);
      break;
    }
    case InitialSpec::Kind::kExplicit:
      initial = SquashedGaussianFromJson(LoadInitialJson(c.initial));
      if (initial.action_dim() != g.dim) {
        throw ConfigError("initial: policy dimension differs from the game");
      }
      break;
  }
  ParamTrainConfig train = c.param_policy.train;
  train.seed = seed;
  Trajectory tr;
  tr.iterates.push_back(MeasureParam(p, initial, 0));
  ParamTrainResult res = TrainParamPolicy(
      g.q, initial, train, [&](long anchor, const SquashedGaussian& theta) {
        tr.iterates.push_back(MeasureParam(p, theta, anchor + 1));
      });
  Density final_density = DiscretizePolicy(res.policy, p.grid);
  tr.max_density = final_density.max_value();
  tr.final_policy =
      JointPolicy{std::move(final_density), Density::Uniform(Support::Atoms(1))};
  SeedRun run{seed, std::move(tr), SquashedGaussianToJson(res.policy)};
  return run;
}

SeedRun RunSeed(const Prepared& p, std::uint64_t seed) {
  switch (p.config->solver) {
    case SolverKind::kDynamics:
      return RunDynamicsSeed(p, seed);
    case SolverKind::kAlgorithm1:
      return RunAlgorithm1Seed(p, seed);
    case SolverKind::kParamPolicy:
      return RunParamSeed(p, seed);
  }
  throw ConfigError("unknown solver");
}

// Prepares every config and solves every (config, seed) pair in one pool.
std::vector<std::vector<SeedRun>> ExecuteAll(
    std::span<const ExperimentConfig> configs) {
  std::vector<std::optional<Prepared>> prepared(configs.size());
  ParallelFor(configs.size(),
              [&](std::size_t i) { prepared[i].emplace(Prepare(configs[i])); });
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  std::vector<std::vector<SeedRun>> runs(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    runs[i].resize(configs[i].seeds.size());
    for (std::size_t k = 0; k < configs[i].seeds.size(); ++k) {
      tasks.emplace_back(i, k);
    }
  }
  ParallelFor(tasks.size(), [&](std::size_t t) {
    const auto [i, k] = tasks[t];
    runs[i][k] = RunSeed(*prepared[i], configs[i].seeds[k]);
  });
  return runs;
}

Json WithoutOutputDir(Json j) {
  j.erase("output_dir");
  return j;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

RunReport WriteRun(const ExperimentConfig& c, std::span<const SeedRun> runs) {
  RunReport report;
  report.config_hash = ConfigHash(WithoutOutputDir(c.source));
  report.summary = Summarize(runs);
  fs::create_directories(c.output_dir);
  Json files = Json::array();
  Json policies = Json::array();
  for (const SeedRun& run : runs) {
    const std::string stem = "seed" + std::to_string(run.seed);
    std::ostringstream csv;
    WriteTrajectoryCsv(csv, run.trajectory);
    const fs::path tpath = c.output_dir / ("trajectory_" + stem + ".csv");
    const fs::path ppath = c.output_dir / ("policy_" + stem + ".json");
    WriteText(tpath, csv.str());
    WriteText(ppath, run.policy.dump(2) + "\n");
    report.trajectory_paths.push_back(tpath);
    report.policy_paths.push_back(ppath);
    files.push_back(tpath.filename().string());
    policies.push_back(ppath.filename().string());
    for (const std::string& w : run.trajectory.warnings) {
      report.warnings.push_back("seed " + std::to_string(run.seed) + ": " + w);
    }
  }
  std::ostringstream summary;
  WriteSummaryCsv(summary, report.summary);
  WriteText(c.output_dir / "summary.csv", summary.str());

  Json rows = Json::array();
  for (const SummaryRow& r : report.summary) {
    rows.push_back({{"metric", r.metric},
                    {"mean", FormatDouble(r.mean)},
                    {"se", FormatDouble(r.se)},
                    {"n", r.n}});
  }
  std::vector<std::uint64_t> seeds;
  for (const SeedRun& run : runs) seeds.push_back(run.seed);
  const Json doc = {{"config_hash", report.config_hash},
                    {"name", c.name},
                    {"solver", ToString(c.solver)},
                    {"seeds", seeds},
                    {"trajectories", files},
                    {"policies", policies},
                    {"summary", rows},
                    {"warnings", report.warnings}};
  WriteText(c.output_dir / "report.json", doc.dump(2) + "\n");
  return report;
}

bool IsIntegerAxis(std::string_view axis) {
  for (std::string_view k :
       {"iterations", "decay_interval", "record_every", "eval_sweeps",
        "improve_steps", "outer_iterations", "initial_state",
        "steps_per_anchor", "batch_size", "resolution"}) {
    if (axis == k) return true;
  }
  return false;
}

}  // namespace

const SummaryRow& RunReport::metric(std::string_view name) const {
  for (const SummaryRow& r : summary) {
    if (r.metric == name) return r;
  }
  throw ValueError("run report has no metric '" + std::string(name) + "'");
}

std::vector<SeedRun> ExecuteSeeds(const ExperimentConfig& config) {
  return std::move(ExecuteAll(std::span(&config, 1)).front());
}

std::vector<SummaryRow> Summarize(std::span<const SeedRun> runs) {
  if (runs.empty()) throw ValueError("Summarize: no runs");
  struct Metric {
    const char* name;
    double TrajectoryPoint::*field;
  };
  const Metric metrics[] = {
      {"final_kl_ref", &TrajectoryPoint::kl_to_reference},
      {"final_exploitability", &TrajectoryPoint::exploitability},
      {"final_value", &TrajectoryPoint::value},
      {"final_entropy_p1", &TrajectoryPoint::entropy_1},
      {"final_entropy_p2", &TrajectoryPoint::entropy_2},
  };
  std::vector<SummaryRow> rows;
  for (const Metric& m : metrics) {
    std::vector<double> xs;
    for (const SeedRun& r : runs) xs.push_back(r.trajectory.iterates.back().*m.field);
    if (std::any_of(xs.begin(), xs.end(), [](double x) { return std::isnan(x); })) {
      continue;
    }
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double se = 0.0;
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    rows.push_back({m.name, mean, se, static_cast<long>(xs.size())});
  }
  return rows;
}

RunReport Run(const ExperimentConfig& config) {
  const std::vector<SeedRun> runs = ExecuteSeeds(config);
  return WriteRun(config, runs);
}

std::vector<std::string> SweepAxes(SolverKind solver) {
  std::vector<std::string> axes;
  switch (solver) {
    case SolverKind::kDynamics:
      axes = {"eta", "alpha", "alpha_floor_fraction", "alpha_decay",
              "decay_interval", "iterations", "record_every"};
      break;
    case SolverKind::kAlgorithm1:
      axes = {"eta", "alpha", "eval_sweeps", "improve_steps",
              "outer_iterations", "damping_tau", "eval_tol", "initial_state"};
      break;
    case SolverKind::kParamPolicy:
      axes = {"eta", "alpha", "outer_iterations", "steps_per_anchor",
              "batch_size", "learning_rate"};
      break;
  }
  axes.push_back("reference_alpha");
  axes.push_back("resolution");
  return axes;
}

SweepResult Sweep(const ExperimentConfig& base, std::string_view axis,
                  std::span<const double> values) {
  const auto axes = SweepAxes(base.solver);
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    std::string known;
    for (const auto& a : axes) known += " " + a;
    throw ConfigError("unknown sweep axis '" + std::string(axis) +
                      "' for solver " + std::string(ToString(base.solver)) +
                      "; known:" + known);
  }
  if (values.empty()) throw ConfigError("sweep: no values");
  const std::string section(ToString(base.solver));
  std::vector<ExperimentConfig> configs;
  for (double v : values) {
    Json j = base.source;
    Json value = v;
    if (IsIntegerAxis(axis)) {
      if (v != std::floor(v) || !std::isfinite(v)) {
        throw ConfigError("sweep: axis '" + std::string(axis) +
                          "' takes integers");
      }
      value = static_cast<long>(v);
    }
    const std::string key(axis);
    if (axis == "reference_alpha") {
      j["reference_alpha"] = value;
    } else if (axis == "resolution" && base.solver != SolverKind::kParamPolicy) {
      if (!j["game"].contains("name")) {
        throw ConfigError("sweep: resolution applies to named kernel games");
      }
      j["game"]["resolution"] = value;
    } else {
      if (!j.contains(section)) j[section] = Json::object();
      j[section][key] = value;
    }
    const fs::path point_dir =
        base.output_dir / (key + "=" + FormatDouble(v));
    j["output_dir"] = fs::absolute(point_dir).string();
    configs.push_back(ParseExperimentConfig(j, base.base_dir));
  }

  const auto runs = ExecuteAll(configs);
  SweepResult result;
  result.axis = std::string(axis);
  const bool has_reference =
      !runs.empty() && !std::isnan(runs[0][0].trajectory.iterates.back().kl_to_reference);
  result.metric = has_reference ? "final_kl_ref" : "final_exploitability";
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    SweepPoint point{values[i], WriteRun(configs[i], runs[i])};
    const SummaryRow& m = point.report.metric(result.metric);
    rows.push_back({values[i], m.mean, m.se});
    result.points.push_back(std::move(point));
  }
  fs::create_directories(base.output_dir);
  result.table_path = base.output_dir / ("sweep_" + result.axis + ".csv");
  std::ostringstream table;
  WriteSweepCsv(table, rows);
  WriteText(result.table_path, table.str());
  return result;
}

std::vector<double> ParseValueList(std::string_view text) {
  std::vector<double> values;
  while (true) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    try {
      values.push_back(ParseDouble(item));
    } catch (const ValueError&) {
      throw ConfigError("bad value '" + std::string(item) + "' in list");
    }
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return values;
}

NamedPolicy LoadNamedPolicy(const fs::path& path) {
  const Json j = ReadJsonFile(path);
  NamedPolicy p{path.stem().string(), JointPolicyFromJson(j)};
  if (j.contains("name") && j.at("name").is_string()) {
    p.name = j.at("name").get<std::string>();
  }
  return p;
}

std::vector<CrossPlayEntry> CrossPlayReport(
    const MatrixGame& game, std::span<const NamedPolicy> policies) {
  if (policies.size() < 2) {
    throw ConfigError("cross-play needs at least two policies");
  }
  std::vector<std::string> names;
  for (const NamedPolicy& p : policies) {
    if (p.name.find_first_of(",\"\n\r") != std::string::npos || p.name.empty()) {
      throw ConfigError("policy name '" + p.name +
                        "' must be non-empty without commas, quotes or newlines");
    }
    if (std::find(names.begin(), names.end(), p.name) == names.end()) {
      names.push_back(p.name);
    }
  }
  const std::size_t n = policies.size();
  std::vector<double> score(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      try {
        score[i * n + j] =
            CrossPlayScore(game, policies[i].policy, policies[j].policy);
      } catch (const SupportMismatchError& e) {
        throw SupportMismatchError("cross-play pair ('" + policies[i].name +
                                   "', '" + policies[j].name + "'): " + e.what());
      }
    }
  }
  if (game.zero_sum()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(score[i * n + j] + score[j * n + i]) > 1e-10) {
          throw ValueError("cross-play antisymmetry violated for ('" +
                           policies[i].name + "', '" + policies[j].name + "')");
        }
      }
    }
  }
  std::vector<CrossPlayEntry> out;
  for (const std::string& row : names) {
    for (const std::string& col : names) {
      double sum = 0.0;
      long count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (policies[i].name != row) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (policies[j].name != col) continue;
          sum += score[i * n + j];
          ++count;
        }
      }
      out.push_back({row, col, sum / static_cast<double>(count)});
    }
  }
  return out;
}

}  // namespace porl
