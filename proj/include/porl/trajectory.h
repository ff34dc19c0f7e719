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

#ifndef PORL_TRAJECTORY_H_
#define PORL_TRAJECTORY_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "porl/games.h"

namespace porl {

// Metrics recorded at one iterate. kl_to_reference is NaN when no reference
// policy was supplied.
struct TrajectoryPoint {
  long t = 0;
  double kl_to_reference = 0.0;
  double exploitability = 0.0;
  double entropy_1 = 0.0;
  double entropy_2 = 0.0;
  double value = 0.0;

  bool operator==(const TrajectoryPoint&) const = default;
};

struct Trajectory {
  std::vector<TrajectoryPoint> iterates;
  std::optional<JointPolicy> final_policy;
  // Largest density value observed over the run (the empirical b).
  double max_density = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kTrajectoryCsvHeader =
    "t,kl_ref,exploitability,entropy_p1,entropy_p2,value";

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double v);
double ParseDouble(std::string_view text);

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& trajectory);

// Reads the rows written by WriteTrajectoryCsv. Throws ValueError on a bad
// header or malformed row.
std::vector<TrajectoryPoint> ReadTrajectoryCsv(std::istream& in);

}  // namespace porl

#endif  // PORL_TRAJECTORY_H_
