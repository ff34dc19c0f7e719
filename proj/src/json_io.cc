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

#include "porl/json_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "porl/error.h"

namespace porl {

void RequireKeys(const Json& j, std::initializer_list<std::string_view> allowed,
                 std::string_view context) {
  if (!j.is_object()) {
    throw ConfigError(std::string(context) + ": expected a JSON object");
  }
  for (const auto& [key, unused] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

namespace {

template <typename T>
T Get(const Json& j, const char* key, std::string_view context) {
  if (!j.contains(key)) {
    throw ConfigError(std::string(context) + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(context) + ": bad value for '" + key +
                      "': " + e.what());
  }
}

}  // namespace

Json DensityToJson(const Density& d) {
  Json cells = Json::array();
  for (const Cell& c : d.support()->cells()) {
    cells.push_back({{"center", c.center}, {"measure", c.measure}});
  }
  return {{"cells", cells},
          {"log_values", std::vector<double>(d.log_values().begin(),
                                             d.log_values().end())}};
}

Density DensityFromJson(const Json& j) {
  RequireKeys(j, {"cells", "log_values"}, "density");
  std::vector<Cell> cells;
  for (const Json& c : Get<Json>(j, "cells", "density")) {
    RequireKeys(c, {"center", "measure"}, "density cell");
    cells.push_back({Get<std::vector<double>>(c, "center", "density cell"),
                     Get<double>(c, "measure", "density cell")});
  }
  return Density::FromNormalizedLogValues(
      Support::FromCells(std::move(cells)),
      Get<std::vector<double>>(j, "log_values", "density"));
}

Json JointPolicyToJson(const JointPolicy& pi, const std::string& name) {
  Json j = {{"player_1", DensityToJson(pi.player_1)},
            {"player_2", DensityToJson(pi.player_2)}};
  if (!name.empty()) j["name"] = name;
  return j;
}

JointPolicy JointPolicyFromJson(const Json& j) {
  RequireKeys(j, {"name", "player_1", "player_2"}, "joint policy");
  return {DensityFromJson(Get<Json>(j, "player_1", "joint policy")),
          DensityFromJson(Get<Json>(j, "player_2", "joint policy"))};
}

MatrixGame MatrixGameFromJson(const Json& j) {
  RequireKeys(j, {"payoff_1", "payoff_2", "zero_sum", "r_max"}, "matrix game");
  Matrix p1 = Matrix::FromRows(
      Get<std::vector<std::vector<double>>>(j, "payoff_1", "matrix game"));
  std::optional<double> r_max;
  if (j.contains("r_max")) r_max = Get<double>(j, "r_max", "matrix game");
  const bool zero_sum =
      j.contains("zero_sum") ? Get<bool>(j, "zero_sum", "matrix game")
                             : !j.contains("payoff_2");
  if (!j.contains("payoff_2")) {
    if (!zero_sum) {
      throw ModelError("matrix game: general-sum games need payoff_2");
    }
    return MatrixGame::ZeroSum(std::move(p1), r_max);
  }
  Matrix p2 = Matrix::FromRows(
      Get<std::vector<std::vector<double>>>(j, "payoff_2", "matrix game"));
  if (zero_sum) {
    if (p2.rows() != p1.rows() || p2.cols() != p1.cols()) {
      throw ModelError("matrix game: payoff shapes differ");
    }
    for (std::size_t r = 0; r < p1.rows(); ++r) {
      for (std::size_t c = 0; c < p1.cols(); ++c) {
        if (p2(r, c) != -p1(r, c)) {
          throw ModelError("matrix game: zero_sum set but payoff_2 != -payoff_1");
        }
      }
    }
    return MatrixGame::ZeroSum(std::move(p1), r_max);
  }
  return MatrixGame::GeneralSum(std::move(p1), std::move(p2), r_max);
}

Json MatrixGameToJson(const MatrixGame& game) {
  Json j = {{"payoff_1", game.payoff_1().ToRows()},
            {"zero_sum", game.zero_sum()},
            {"r_max", game.r_max()}};
  if (!game.zero_sum()) j["payoff_2"] = game.payoff_2().ToRows();
  return j;
}

TabularSG TabularSGFromJson(const Json& j) {
  RequireKeys(j,
              {"states", "actions", "transition", "rewards", "gamma",
               "terminals", "r_max"},
              "stochastic game");
  constexpr std::string_view ctx = "stochastic game";
  const int n = Get<int>(j, "states", ctx);
  const auto actions = Get<std::vector<int>>(j, "actions", ctx);
  if (actions.size() != 2) {
    throw ModelError("stochastic game: actions must be [d1, d2]");
  }
  const int d1 = actions[0];
  const int d2 = actions[1];
  if (n < 1 || d1 < 1 || d2 < 1) {
    throw ModelError("stochastic game: states and actions must be positive");
  }
  const auto transition =
      Get<std::vector<std::vector<std::vector<std::vector<double>>>>>(
          j, "transition", ctx);
  const auto rewards =
      Get<std::vector<std::vector<std::vector<double>>>>(j, "rewards", ctx);
  std::vector<double> flat_t;
  std::vector<double> flat_r;
  if (static_cast<int>(transition.size()) != n ||
      static_cast<int>(rewards.size()) != n) {
    throw ModelError("stochastic game: tables need one entry per state");
  }
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(transition[s].size()) != d1 ||
        static_cast<int>(rewards[s].size()) != d1) {
      throw ModelError("stochastic game: tables need d1 rows per state");
    }
    for (int a1 = 0; a1 < d1; ++a1) {
      if (static_cast<int>(transition[s][a1].size()) != d2 ||
          static_cast<int>(rewards[s][a1].size()) != d2) {
        throw ModelError("stochastic game: tables need d2 columns per row");
      }
      for (int a2 = 0; a2 < d2; ++a2) {
        if (static_cast<int>(transition[s][a1][a2].size()) != n) {
          throw ModelError(
              "stochastic game: transition rows need one entry per state");
        }
        flat_t.insert(flat_t.end(), transition[s][a1][a2].begin(),
                      transition[s][a1][a2].end());
        flat_r.push_back(rewards[s][a1][a2]);
      }
    }
  }
  std::vector<int> terminals;
  if (j.contains("terminals")) {
    terminals = Get<std::vector<int>>(j, "terminals", ctx);
  }
  std::optional<double> r_max;
  if (j.contains("r_max")) r_max = Get<double>(j, "r_max", ctx);
  return TabularSG(n, d1, d2, std::move(flat_t), std::move(flat_r),
                   Get<double>(j, "gamma", ctx), std::move(terminals), r_max);
}

Json TabularSGToJson(const TabularSG& sg) {
  const int n = sg.num_states();
  const int d1 = sg.num_actions(Player::kOne);
  const int d2 = sg.num_actions(Player::kTwo);
  Json transition = Json::array();
  Json rewards = Json::array();
  for (int s = 0; s < n; ++s) {
    Json ts = Json::array();
    Json rs = Json::array();
    for (int a1 = 0; a1 < d1; ++a1) {
      Json ta = Json::array();
      Json ra = Json::array();
      for (int a2 = 0; a2 < d2; ++a2) {
        const auto row = sg.transition(s, a1, a2);
        ta.push_back(std::vector<double>(row.begin(), row.end()));
        ra.push_back(sg.reward(s, a1, a2));
      }
      ts.push_back(ta);
      rs.push_back(ra);
    }
    transition.push_back(ts);
    rewards.push_back(rs);
  }
  return {{"states", n},
          {"actions", {d1, d2}},
          {"transition", transition},
          {"rewards", rewards},
          {"gamma", sg.gamma()},
          {"terminals", sg.terminal_states()},
          {"r_max", sg.r_max()}};
}

Json SquashedGaussianToJson(const SquashedGaussian& policy) {
  return {{"mu", policy.mu}, {"log_sigma", policy.log_sigma}};
}

SquashedGaussian SquashedGaussianFromJson(const Json& j) {
  RequireKeys(j, {"mu", "log_sigma"}, "squashed gaussian");
  SquashedGaussian p{Get<std::vector<double>>(j, "mu", "squashed gaussian"),
                     Get<std::vector<double>>(j, "log_sigma",
                                              "squashed gaussian")};
  p.Validate();
  return p;
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
}

}  // namespace porl
