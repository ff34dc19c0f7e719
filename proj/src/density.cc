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

#include "porl/density.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "porl/error.h"

namespace porl {

Support::Support(std::vector<Cell> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw ValueError("Support: at least one cell required");
  const std::size_t dim = cells_.front().center.size();
  for (const Cell& c : cells_) {
    if (!(c.measure > 0.0) || !std::isfinite(c.measure)) {
      throw ValueError("Support: cell measures must be positive and finite");
    }
    if (c.center.size() != dim) {
      throw ValueError("Support: cell centers must share one dimension");
    }
    total_volume_ += c.measure;
  }
}

std::shared_ptr<const Support> Support::Atoms(std::size_t n) {
  std::vector<Cell> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    cells[i].center = {static_cast<double>(i)};
    cells[i].measure = 1.0;
  }
  return std::shared_ptr<const Support>(new Support(std::move(cells)));
}

std::shared_ptr<const Support> Support::Grid(std::span<const double> lows,
                                             std::span<const double> highs,
                                             std::span<const int> resolution) {
  const std::size_t dim = lows.size();
  if (dim == 0 || highs.size() != dim || resolution.size() != dim) {
    throw ValueError("Support::Grid: box and resolution dimensions differ");
  }
  double cell_measure = 1.0;
  std::size_t count = 1;
  std::vector<double> width(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(highs[k] > lows[k]) || !std::isfinite(lows[k]) ||
        !std::isfinite(highs[k])) {
      throw ValueError("Support::Grid: each axis needs finite low < high");
    }
    if (resolution[k] < 1) {
      throw ValueError("Support::Grid: resolution must be positive");
    }
    width[k] = (highs[k] - lows[k]) / resolution[k];
    cell_measure *= width[k];
    count *= static_cast<std::size_t>(resolution[k]);
  }

  std::vector<Cell> cells(count);
  std::vector<int> index(dim, 0);
  for (std::size_t n = 0; n < count; ++n) {
    Cell& c = cells[n];
    c.center.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      c.center[k] = lows[k] + (index[k] + 0.5) * width[k];
    }
    c.measure = cell_measure;
    for (std::size_t k = dim; k-- > 0;) {
      if (++index[k] < resolution[k]) break;
      index[k] = 0;
    }
  }
  return std::shared_ptr<const Support>(new Support(std::move(cells)));
}

std::shared_ptr<const Support> Support::FromCells(std::vector<Cell> cells) {
  return std::shared_ptr<const Support>(new Support(std::move(cells)));
}

std::size_t Support::dimension() const { return cells_.front().center.size(); }

bool Support::operator==(const Support& other) const {
  return cells_ == other.cells_;
}

bool SameSupport(const SupportPtr& a, const SupportPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void RequireSameSupport(const SupportPtr& a, const SupportPtr& b,
                        const char* context) {
  if (!SameSupport(a, b)) {
    std::ostringstream msg;
    msg << context << ": support mismatch (" << (a ? a->size() : 0)
        << " vs " << (b ? b->size() : 0) << " cells)";
    throw SupportMismatchError(msg.str());
  }
}

double LogPartition(const Support& support, std::span<const double> logits) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    hi = std::max(hi, logits[i] + std::log(support.measure(i)));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    sum += std::exp(logits[i] + std::log(support.measure(i)) - hi);
  }
  return hi + std::log(sum);
}

namespace {

void CheckUpperBound(const std::vector<double>& log_values,
                     std::optional<double> upper_bound) {
  if (!upper_bound) return;
  if (!(*upper_bound > 0.0)) {
    throw ValueError("Density: upper bound must be positive");
  }
  const double log_b = std::log(*upper_bound);
  for (double lv : log_values) {
    if (lv > log_b) {
      std::ostringstream msg;
      msg << "Density: value " << std::exp(lv) << " exceeds upper bound "
          << *upper_bound;
      throw ValueError(msg.str());
    }
  }
}

}  // namespace

Density::Density(SupportPtr support, std::vector<double> log_values,
                 std::optional<double> upper_bound)
    : support_(std::move(support)),
      log_values_(std::move(log_values)),
      upper_bound_(upper_bound) {
  CheckUpperBound(log_values_, upper_bound_);
}

Density Density::FromLogits(SupportPtr support, std::vector<double> logits,
                            std::optional<double> upper_bound) {
  if (!support) throw ValueError("Density: null support");
  if (logits.size() != support->size()) {
    throw SupportMismatchError("Density: logit count differs from support");
  }
  for (double l : logits) {
    if (!std::isfinite(l)) throw ValueError("Density: non-finite logit");
  }
  const double log_z = LogPartition(*support, logits);
  for (double& l : logits) l -= log_z;
  return Density(std::move(support), std::move(logits), upper_bound);
}

Density Density::FromValues(SupportPtr support, std::span<const double> values,
                            std::optional<double> upper_bound) {
  std::vector<double> logits(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw ValueError(
          "Density: values must be strictly positive and finite (zero mass "
          "cells are not representable)");
    }
    logits[i] = std::log(values[i]);
  }
  return FromLogits(std::move(support), std::move(logits), upper_bound);
}

Density Density::FromNormalizedLogValues(SupportPtr support,
                                         std::vector<double> log_values,
                                         std::optional<double> upper_bound) {
  if (!support) throw ValueError("Density: null support");
  if (log_values.size() != support->size()) {
    throw SupportMismatchError("Density: value count differs from support");
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < log_values.size(); ++i) {
    if (!std::isfinite(log_values[i])) {
      throw ValueError("Density: non-finite log value");
    }
    mass += std::exp(log_values[i]) * support->measure(i);
  }
  if (std::abs(mass - 1.0) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg << "Density: total mass " << mass << " is not normalized";
    throw ValueError(msg.str());
  }
  return Density(std::move(support), std::move(log_values), upper_bound);
}

Density Density::Uniform(SupportPtr support) {
  if (!support) throw ValueError("Density: null support");
  std::vector<double> log_values(support->size(),
                                 -std::log(support->total_volume()));
  return Density(std::move(support), std::move(log_values), std::nullopt);
}

double Density::value(std::size_t i) const { return std::exp(log_values_[i]); }

std::vector<double> Density::values() const {
  std::vector<double> out(log_values_.size());
  std::transform(log_values_.begin(), log_values_.end(), out.begin(),
                 [](double lv) { return std::exp(lv); });
  return out;
}

double Density::mass(std::size_t i) const {
  return value(i) * support_->measure(i);
}

double Density::max_value() const {
  return std::exp(*std::max_element(log_values_.begin(), log_values_.end()));
}

double Entropy(const Density& d) {
  double h = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    h -= d.mass(i) * d.log_value(i);
  }
  return h;
}

double Kl(const Density& p, const Density& q) {
  RequireSameSupport(p.support(), q.support(), "Kl");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    kl += p.mass(i) * (p.log_value(i) - q.log_value(i));
  }
  // Rounding can leave a tiny negative value when p == q.
  return std::max(kl, 0.0);
}

double L2Distance(const Density& p, const Density& q) {
  RequireSameSupport(p.support(), q.support(), "L2Distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p.value(i) - q.value(i);
    sum += diff * diff * p.support()->measure(i);
  }
  return std::sqrt(sum);
}

double Inner(const Density& p, std::span<const double> f) {
  if (f.size() != p.size()) {
    throw SupportMismatchError("Inner: value vector size differs from support");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += p.mass(i) * f[i];
  return sum;
}

Density Mix(const Density& p, const Density& q, double weight) {
  RequireSameSupport(p.support(), q.support(), "Mix");
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw ValueError("Mix: weight must lie in [0, 1]");
  }
  std::vector<double> logits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    logits[i] = std::log((1.0 - weight) * p.value(i) + weight * q.value(i));
  }
  return Density::FromLogits(p.support(), std::move(logits));
}

ThreePoint KlThreePoint(const Density& z_bar, const Density& z,
                        const Density& y) {
  RequireSameSupport(z_bar.support(), z.support(), "KlThreePoint");
  RequireSameSupport(z_bar.support(), y.support(), "KlThreePoint");
  ThreePoint out;
  // Unclamped sums so that the identity holds to rounding error.
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double m = z.support()->measure(i);
    const double lzb = z_bar.log_value(i);
    const double lz = z.log_value(i);
    const double ly = y.log_value(i);
    out.lhs += m * (z_bar.value(i) * (lzb - ly) - z.value(i) * (lz - ly) +
                    z.value(i) * (lz - lzb));
    out.rhs += m * (lzb - ly) * (z_bar.value(i) - z.value(i));
  }
  return out;
}

}  // namespace porl
