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
#include <cstdio>
#include <limits>
#include <sstream>

#include "porl/error.h"
#include "porl/harness.h"

namespace porl {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kMatrixGames = {"matching_pennies",
                                               "rock_paper_scissors"};

bool Contains(const std::vector<std::string>& names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

double GetNumber(const Json& j, const char* key, std::string_view ctx) {
  const Json& v = j.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string(ctx) + ": '" + key + "' must be a number");
  }
  return v.get<double>();
}

long GetInteger(const Json& j, const char* key, std::string_view ctx) {
  const Json& v = j.at(key);
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) &&
        std::abs(d) < 9.0e15) {
      return static_cast<long>(d);
    }
  }
  throw ConfigError(std::string(ctx) + ": '" + key + "' must be an integer");
}

std::string GetString(const Json& j, const char* key, std::string_view ctx) {
  const Json& v = j.at(key);
  if (!v.is_string()) {
    throw ConfigError(std::string(ctx) + ": '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

template <typename T, typename F>
void Maybe(const Json& j, const char* key, T& target, F get) {
  if (j.contains(key)) target = static_cast<T>(get(j, key));
}

fs::path Resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

fs::path ExistingPath(const Json& j, const char* key, const fs::path& base,
                      std::string_view ctx) {
  const fs::path p = Resolve(base, GetString(j, key, ctx));
  if (!fs::exists(p)) {
    throw ConfigError(std::string(ctx) + ": file '" + p.string() +
                      "' does not exist");
  }
  return p;
}

KernelParams ParseParams(const Json& j) {
  if (!j.is_object()) throw ConfigError("game params must be an object");
  KernelParams params;
  for (const auto& [key, value] : j.items()) {
    if (value.is_number()) {
      params[key] = {value.get<double>()};
    } else if (value.is_array() &&
               std::all_of(value.begin(), value.end(),
                           [](const Json& x) { return x.is_number(); })) {
      params[key] = value.get<std::vector<double>>();
    } else {
      throw ConfigError("game param '" + key +
                        "' must be a number or an array of numbers");
    }
  }
  return params;
}

void ParseDynamics(const Json& j, DynamicsConfig& c) {
  constexpr std::string_view ctx = "dynamics";
  RequireKeys(j,
              {"eta", "alpha", "alpha_floor_fraction", "alpha_decay",
               "decay_interval", "rule", "iterations", "record_every"},
              ctx);
  auto num = [&](const Json& x, const char* k) { return GetNumber(x, k, ctx); };
  auto integer = [&](const Json& x, const char* k) {
    return GetInteger(x, k, ctx);
  };
  Maybe(j, "eta", c.eta, num);
  Maybe(j, "alpha", c.alpha, num);
  Maybe(j, "alpha_floor_fraction", c.alpha_floor_fraction, num);
  Maybe(j, "alpha_decay", c.alpha_decay, num);
  Maybe(j, "decay_interval", c.decay_interval, integer);
  Maybe(j, "iterations", c.iterations, integer);
  Maybe(j, "record_every", c.record_every, integer);
  if (j.contains("rule")) c.rule = ParseUpdateRule(GetString(j, "rule", ctx));
  c.Validate();
}

void ParseAlgorithm1(const Json& j, Algorithm1Config& c, int& initial_state) {
  constexpr std::string_view ctx = "algorithm1";
  RequireKeys(j,
              {"eta", "alpha", "eval_sweeps", "improve_steps",
               "outer_iterations", "damping_tau", "eval_tol", "initial_state"},
              ctx);
  auto num = [&](const Json& x, const char* k) { return GetNumber(x, k, ctx); };
  auto integer = [&](const Json& x, const char* k) {
    return GetInteger(x, k, ctx);
  };
  Maybe(j, "eta", c.eta, num);
  Maybe(j, "alpha", c.alpha, num);
  Maybe(j, "eval_sweeps", c.eval_sweeps, integer);
  Maybe(j, "improve_steps", c.improve_steps, integer);
  Maybe(j, "outer_iterations", c.outer_iterations, integer);
  Maybe(j, "damping_tau", c.damping_tau, num);
  Maybe(j, "eval_tol", c.eval_tol, num);
  Maybe(j, "initial_state", initial_state, integer);
  c.Validate();
  if (initial_state < 0) throw ConfigError("algorithm1: initial_state < 0");
}

void ParseParamPolicy(const Json& j, ParamSolverConfig& c) {
  constexpr std::string_view ctx = "param_policy";
  RequireKeys(j,
              {"eta", "alpha", "outer_iterations", "steps_per_anchor",
               "batch_size", "learning_rate", "resolution"},
              ctx);
  auto num = [&](const Json& x, const char* k) { return GetNumber(x, k, ctx); };
  auto integer = [&](const Json& x, const char* k) {
    return GetInteger(x, k, ctx);
  };
  Maybe(j, "eta", c.train.eta, num);
  Maybe(j, "alpha", c.train.alpha, num);
  Maybe(j, "outer_iterations", c.train.outer_iterations, integer);
  Maybe(j, "steps_per_anchor", c.train.steps_per_anchor, integer);
  Maybe(j, "batch_size", c.train.batch_size, integer);
  Maybe(j, "learning_rate", c.train.learning_rate, num);
  Maybe(j, "resolution", c.resolution, integer);
  c.train.Validate();
  if (c.resolution < 2) throw ConfigError("param_policy: resolution must be >= 2");
}

SolverKind ParseSolver(std::string_view name) {
  if (name == "dynamics") return SolverKind::kDynamics;
  if (name == "algorithm1") return SolverKind::kAlgorithm1;
  if (name == "param_policy") return SolverKind::kParamPolicy;
  throw ConfigError("unknown solver '" + std::string(name) +
                    "' (expected dynamics, algorithm1 or param_policy)");
}

}  // namespace

std::string_view ToString(SolverKind kind) {
  switch (kind) {
    case SolverKind::kDynamics:
      return "dynamics";
    case SolverKind::kAlgorithm1:
      return "algorithm1";
    case SolverKind::kParamPolicy:
      return "param_policy";
  }
  return "dynamics";
}

GameSpec ParseGameSpec(const Json& j, const fs::path& base_dir) {
  constexpr std::string_view ctx = "game";
  RequireKeys(j, {"name", "params", "resolution", "path"}, ctx);
  GameSpec spec;
  if (j.contains("path")) {
    if (j.contains("name") || j.contains("params") || j.contains("resolution")) {
      throw ConfigError("game: 'path' excludes name, params and resolution");
    }
    spec.path = ExistingPath(j, "path", base_dir, ctx);
    return spec;
  }
  if (!j.contains("name")) throw ConfigError("game: need 'name' or 'path'");
  spec.name = GetString(j, "name", ctx);
  if (j.contains("params")) spec.params = ParseParams(j.at("params"));
  if (j.contains("resolution")) {
    spec.resolution = static_cast<int>(GetInteger(j, "resolution", ctx));
  }
  return spec;
}

GameSpec ParseGameSpecString(std::string_view text) {
  GameSpec spec;
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  if (colon == std::string_view::npos &&
      (fs::exists(head) || head.ends_with(".json"))) {
    if (!fs::exists(head)) {
      throw ConfigError("game file '" + head + "' does not exist");
    }
    spec.path = head;
    return spec;
  }
  spec.name = head;
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{}
                                           : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("game spec: expected key=value, got '" +
                        std::string(item) + "'");
    }
    const std::string key(item.substr(0, eq));
    std::vector<double> values;
    std::string_view v = item.substr(eq + 1);
    while (true) {
      const auto semi = v.find(';');
      try {
        values.push_back(ParseDouble(v.substr(0, semi)));
      } catch (const ValueError&) {
        throw ConfigError("game spec: bad number in '" + std::string(item) +
                          "'");
      }
      if (semi == std::string_view::npos) break;
      v = v.substr(semi + 1);
    }
    if (key == "resolution") {
      if (values.size() != 1 || values[0] != std::floor(values[0])) {
        throw ConfigError("game spec: resolution must be one integer");
      }
      spec.resolution = static_cast<int>(values[0]);
    } else {
      spec.params[key] = std::move(values);
    }
  }
  return spec;
}

LoadedGame LoadGame(const GameSpec& spec) {
  if (!spec.path.empty()) {
    const Json j = ReadJsonFile(spec.path);
    if (j.is_object() && j.contains("states")) return TabularSGFromJson(j);
    return MatrixGameFromJson(j);
  }
  if (Contains(kMatrixGames, spec.name)) {
    if (!spec.params.empty()) {
      throw ConfigError("game '" + spec.name + "' takes no parameters");
    }
    return spec.name == "matching_pennies" ? MatchingPennies()
                                           : RockPaperScissors();
  }
  if (Contains(BuiltinKernelNames(), spec.name)) {
    return Discretize(BuiltinKernelGame(spec.name, spec.params),
                      spec.resolution);
  }
  if (Contains(BuiltinQFunctionNames(), spec.name)) {
    KernelParams params = spec.params;
    std::size_t dim = 1;
    if (auto it = params.find("dim"); it != params.end()) {
      if (it->second.size() != 1 || !(it->second[0] >= 1.0) ||
          it->second[0] != std::floor(it->second[0])) {
        throw ConfigError("q function dim must be a positive integer");
      }
      dim = static_cast<std::size_t>(it->second[0]);
      params.erase(it);
    }
    return ContinuousGame{spec.name, BuiltinQFunction(spec.name, params, dim),
                          dim};
  }
  std::ostringstream msg;
  msg << "unknown game '" << spec.name << "'; known:";
  for (const auto& n : kMatrixGames) msg << ' ' << n;
  for (const auto& n : BuiltinKernelNames()) msg << ' ' << n;
  for (const auto& n : BuiltinQFunctionNames()) msg << ' ' << n;
  throw ConfigError(msg.str());
}

MatrixGame LoadMatrixGame(const GameSpec& spec) {
  LoadedGame game = LoadGame(spec);
  if (auto* m = std::get_if<MatrixGame>(&game)) return std::move(*m);
  throw ConfigError("expected a matrix or kernel game");
}

ExperimentConfig ParseExperimentConfig(const Json& j, const fs::path& base_dir) {
  RequireKeys(j,
              {"name", "game", "solver", "dynamics", "algorithm1",
               "param_policy", "reference", "reference_alpha", "initial",
               "output_dir", "seeds"},
              "config");
  for (const char* key : {"game", "solver", "output_dir", "seeds"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("config: missing key '") + key + "'");
    }
  }
  ExperimentConfig c;
  c.source = j;
  c.base_dir = base_dir;
  if (j.contains("name")) c.name = GetString(j, "name", "config");
  c.game = ParseGameSpec(j.at("game"), base_dir);
  c.solver = ParseSolver(GetString(j, "solver", "config"));
  const std::string section(ToString(c.solver));
  for (const char* other : {"dynamics", "algorithm1", "param_policy"}) {
    if (other != section && j.contains(other)) {
      throw ConfigError(std::string("config: section '") + other +
                        "' does not apply to solver '" + section + "'");
    }
  }
  const Json empty = Json::object();
  const Json& payload = j.contains(section) ? j.at(section) : empty;
  switch (c.solver) {
    case SolverKind::kDynamics:
      ParseDynamics(payload, c.dynamics);
      break;
    case SolverKind::kAlgorithm1:
      ParseAlgorithm1(payload, c.algorithm1, c.initial_state);
      break;
    case SolverKind::kParamPolicy:
      ParseParamPolicy(payload, c.param_policy);
      break;
  }
  if (c.name.empty()) {
    c.name = c.solver == SolverKind::kDynamics
                 ? std::string(ToString(c.dynamics.rule))
                 : section;
  }

  if (j.contains("reference")) {
    const Json& r = j.at("reference");
    if (r.is_string()) {
      const std::string kind = r.get<std::string>();
      if (kind == "qre") {
        c.reference.kind = ReferenceSpec::Kind::kQre;
      } else if (kind == "none") {
        c.reference.kind = ReferenceSpec::Kind::kNone;
      } else {
        throw ConfigError("reference must be \"qre\", \"none\" or {\"path\": ...}");
      }
    } else if (r.is_object() && r.contains("path")) {
      RequireKeys(r, {"path"}, "reference");
      c.reference.kind = ReferenceSpec::Kind::kPath;
      c.reference.path = ExistingPath(r, "path", base_dir, "reference");
    } else if (r.is_object() && r.contains("kind")) {
      RequireKeys(r, {"kind", "tol", "max_iters"}, "reference");
      if (GetString(r, "kind", "reference") != "qre") {
        throw ConfigError("reference: only kind \"qre\" takes solver options");
      }
      c.reference.kind = ReferenceSpec::Kind::kQre;
      if (r.contains("tol")) {
        c.reference.tol = GetNumber(r, "tol", "reference");
        if (!(*c.reference.tol > 0.0)) {
          throw ConfigError("reference: tol must be positive");
        }
      }
      if (r.contains("max_iters")) {
        c.reference.max_iters = GetInteger(r, "max_iters", "reference");
        if (*c.reference.max_iters < 1) {
          throw ConfigError("reference: max_iters must be at least 1");
        }
      }
    } else {
      throw ConfigError(
          "reference must be \"qre\", \"none\", {\"path\": ...} or "
          "{\"kind\": \"qre\", \"tol\": ..., \"max_iters\": ...}");
    }
  }
  if (j.contains("reference_alpha")) {
    const double a = GetNumber(j, "reference_alpha", "config");
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw ConfigError("reference_alpha must be positive");
    }
    c.reference_alpha = a;
  }

  if (j.contains("initial")) {
    const Json& init = j.at("initial");
    RequireKeys(init, {"kind", "scale", "path", "policy"}, "initial");
    const std::string kind =
        init.contains("kind") ? GetString(init, "kind", "initial") : "uniform";
    if (kind == "uniform") {
      c.initial.kind = InitialSpec::Kind::kUniform;
    } else if (kind == "random") {
      c.initial.kind = InitialSpec::Kind::kRandom;
    } else if (kind == "explicit") {
      c.initial.kind = InitialSpec::Kind::kExplicit;
      if (init.contains("path") == init.contains("policy")) {
        throw ConfigError("initial: explicit needs exactly one of path, policy");
      }
      if (init.contains("path")) {
        c.initial.path = ExistingPath(init, "path", base_dir, "initial");
      } else {
        c.initial.policy = init.at("policy");
      }
    } else {
      throw ConfigError("initial: unknown kind '" + kind + "'");
    }
    if (init.contains("scale")) {
      c.initial.scale = GetNumber(init, "scale", "initial");
      if (!(c.initial.scale >= 0.0) || !std::isfinite(c.initial.scale)) {
        throw ConfigError("initial: scale must be non-negative");
      }
    }
    if (c.initial.kind != InitialSpec::Kind::kExplicit &&
        (init.contains("path") || init.contains("policy"))) {
      throw ConfigError("initial: path/policy only apply to kind explicit");
    }
  }

  c.output_dir = Resolve(base_dir, GetString(j, "output_dir", "config"));
  const Json& seeds = j.at("seeds");
  if (!seeds.is_array() || seeds.empty()) {
    throw ConfigError("config: seeds must be a non-empty array");
  }
  for (const Json& s : seeds) {
    if (!s.is_number_integer() || s.get<long long>() < 0) {
      throw ConfigError("config: seeds must be non-negative integers");
    }
    c.seeds.push_back(s.get<std::uint64_t>());
  }
  return c;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  return ParseExperimentConfig(ReadJsonFile(path), path.parent_path());
}

std::string ConfigHash(const Json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace porl
