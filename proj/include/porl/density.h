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

#ifndef PORL_DENSITY_H_
#define PORL_DENSITY_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace porl {

// Normalization tolerance enforced on every Density.
inline constexpr double kNormalizationTolerance = 1e-10;

// One integration cell: a representative point and its Lebesgue measure.
struct Cell {
  std::vector<double> center;
  double measure = 1.0;

  bool operator==(const Cell&) const = default;
};

// A finite partition of an action set. Discrete action sets are unit-measure
// atoms; compact boxes are split into equal midpoint cells.
class Support {
 public:
  // `n` unit-measure atoms with centers 0, 1, ..., n-1.
  static std::shared_ptr<const Support> Atoms(std::size_t n);

  // Midpoint-rule grid on the box [lows, highs], `resolution[k]` cells along
  // axis k. Cells are ordered row-major (last axis varies fastest).
  static std::shared_ptr<const Support> Grid(std::span<const double> lows,
                                             std::span<const double> highs,
                                             std::span<const int> resolution);

  // Arbitrary cells; every measure must be strictly positive and finite.
  static std::shared_ptr<const Support> FromCells(std::vector<Cell> cells);

  std::size_t size() const { return cells_.size(); }
  std::size_t dimension() const;
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  double measure(std::size_t i) const { return cells_[i].measure; }
  double total_volume() const { return total_volume_; }

  // Structural equality: same cells in the same order.
  bool operator==(const Support& other) const;

 private:
  explicit Support(std::vector<Cell> cells);

  std::vector<Cell> cells_;
  double total_volume_ = 0.0;
};

using SupportPtr = std::shared_ptr<const Support>;

// True when both pointers denote the same partition (identity or structure).
bool SameSupport(const SupportPtr& a, const SupportPtr& b);

// Throws SupportMismatchError unless SameSupport(a, b).
void RequireSameSupport(const SupportPtr& a, const SupportPtr& b,
                        const char* context);

// A strictly positive probability density over a Support, stored as
// normalized log density values (log p(cell)), so that
// sum_i exp(log_values[i]) * measure(i) == 1.
//
// Densities are immutable values; all operations return new objects.
class Density {
 public:
  // Normalizes exp(logits) with respect to the cell measures. Logits must be
  // finite. If `upper_bound` is set, every resulting density value must be
  // <= *upper_bound or ValueError is thrown.
  static Density FromLogits(SupportPtr support, std::vector<double> logits,
                            std::optional<double> upper_bound = std::nullopt);

  // Normalizes strictly positive density (or probability-mass) values.
  // Zero, negative, or non-finite inputs are rejected with ValueError.
  static Density FromValues(SupportPtr support, std::span<const double> values,
                            std::optional<double> upper_bound = std::nullopt);

  // Takes already-normalized log values; rejects inputs whose total mass
  // deviates from 1 by more than kNormalizationTolerance.
  static Density FromNormalizedLogValues(
      SupportPtr support, std::vector<double> log_values,
      std::optional<double> upper_bound = std::nullopt);

  static Density Uniform(SupportPtr support);

  const SupportPtr& support() const { return support_; }
  std::size_t size() const { return log_values_.size(); }
  std::span<const double> log_values() const { return log_values_; }
  double log_value(std::size_t i) const { return log_values_[i]; }
  double value(std::size_t i) const;
  std::vector<double> values() const;
  // value(i) * measure(i): the probability mass of cell i.
  double mass(std::size_t i) const;
  std::optional<double> upper_bound() const { return upper_bound_; }
  double max_value() const;

 private:
  Density(SupportPtr support, std::vector<double> log_values,
          std::optional<double> upper_bound);

  SupportPtr support_;
  std::vector<double> log_values_;
  std::optional<double> upper_bound_;
};

// log( sum_i exp(logits[i]) * measure(i) ), computed stably.
double LogPartition(const Support& support, std::span<const double> logits);

// Differential entropy -sum p log p * measure. May be negative.
double Entropy(const Density& d);

// KL(p, q) = sum p log(p / q) * measure. Throws SupportMismatchError.
double Kl(const Density& p, const Density& q);

// sqrt( sum (p - q)^2 * measure ).
double L2Distance(const Density& p, const Density& q);

// Measure-weighted inner product <p, f> = sum p(i) f(i) measure(i).
double Inner(const Density& p, std::span<const double> f);

// Convex combination (1 - weight) * p + weight * q, renormalized.
Density Mix(const Density& p, const Density& q, double weight);

// Both sides of the three-point identity
//   KL(z_bar, y) - KL(z, y) + KL(z, z_bar) = <log z_bar - log y, z_bar - z>.
struct ThreePoint {
  double lhs = 0.0;
  double rhs = 0.0;
};

ThreePoint KlThreePoint(const Density& z_bar, const Density& z,
                        const Density& y);

}  // namespace porl

#endif  // PORL_DENSITY_H_
