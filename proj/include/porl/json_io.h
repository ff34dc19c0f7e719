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

#ifndef PORL_JSON_IO_H_
#define PORL_JSON_IO_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "porl/density.h"
#include "porl/games.h"
#include "porl/param_policy.h"

namespace porl {

using Json = nlohmann::json;

// {"cells": [{"center": [...], "measure": m}, ...], "log_values": [...]}
Json DensityToJson(const Density& d);
Density DensityFromJson(const Json& j);

// {"name": optional, "player_1": <density>, "player_2": <density>}
Json JointPolicyToJson(const JointPolicy& pi, const std::string& name = "");
JointPolicy JointPolicyFromJson(const Json& j);

// {"payoff_1": [[...]], "payoff_2": [[...]] (optional), "zero_sum": bool
//  (optional), "r_max": number (optional)}. A missing payoff_2 means
// zero-sum; zero_sum = true with an inconsistent payoff_2 is a ModelError.
MatrixGame MatrixGameFromJson(const Json& j);
Json MatrixGameToJson(const MatrixGame& game);

// {"states": n, "actions": [d1, d2], "transition": [s][a1][a2][s'],
//  "rewards": [s][a1][a2], "gamma": g, "terminals": [...],
//  "r_max": number (optional)}
TabularSG TabularSGFromJson(const Json& j);
Json TabularSGToJson(const TabularSG& sg);

// {"mu": [...], "log_sigma": [...]}
Json SquashedGaussianToJson(const SquashedGaussian& policy);
SquashedGaussian SquashedGaussianFromJson(const Json& j);

// Parses a file; throws ConfigError when it cannot be opened or parsed.
Json ReadJsonFile(const std::filesystem::path& path);

// Throws ConfigError when `j` holds a key outside `allowed`.
void RequireKeys(const Json& j, std::initializer_list<std::string_view> allowed,
                 std::string_view context);

}  // namespace porl

#endif  // PORL_JSON_IO_H_
