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

#include "porl/trajectory.h"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

#include "porl/error.h"

namespace porl {

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw ValueError("FormatDouble: conversion failed");
  return std::string(buf.data(), end);
}

double ParseDouble(std::string_view text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ValueError("ParseDouble: bad number '" + std::string(text) + "'");
  }
  return v;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryCsvHeader << '\n';
  for (const TrajectoryPoint& p : trajectory.iterates) {
    out << p.t << ',' << FormatDouble(p.kl_to_reference) << ','
        << FormatDouble(p.exploitability) << ',' << FormatDouble(p.entropy_1)
        << ',' << FormatDouble(p.entropy_2) << ',' << FormatDouble(p.value)
        << '\n';
  }
}

std::vector<TrajectoryPoint> ReadTrajectoryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryCsvHeader) {
    throw ValueError("trajectory CSV: unexpected header");
  }
  std::vector<TrajectoryPoint> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 6) {
      throw ValueError("trajectory CSV: expected 6 fields in '" + line + "'");
    }
    TrajectoryPoint p;
    long t = 0;
    auto [end, ec] = std::from_chars(fields[0].data(),
                                     fields[0].data() + fields[0].size(), t);
    if (ec != std::errc() || end != fields[0].data() + fields[0].size()) {
      throw ValueError("trajectory CSV: bad iterate index");
    }
    p.t = t;
    p.kl_to_reference = ParseDouble(fields[1]);
    p.exploitability = ParseDouble(fields[2]);
    p.entropy_1 = ParseDouble(fields[3]);
    p.entropy_2 = ParseDouble(fields[4]);
    p.value = ParseDouble(fields[5]);
    rows.push_back(p);
  }
  return rows;
}

}  // namespace porl
