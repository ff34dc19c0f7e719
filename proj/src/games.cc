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

#include "porl/games.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "porl/error.h"

namespace porl {

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw ValueError("Matrix: empty payoff table");
  }
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw ValueError("Matrix: ragged payoff rows");
    }
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::vector<double>> Matrix::ToRows() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
  }
  return out;
}

MatrixGame::MatrixGame(Matrix payoff_1, Matrix payoff_2, bool zero_sum,
                       std::optional<double> r_max, SupportPtr support_1,
                       SupportPtr support_2)
    : payoff_1_(std::move(payoff_1)),
      payoff_2_(std::move(payoff_2)),
      zero_sum_(zero_sum),
      support_1_(std::move(support_1)),
      support_2_(std::move(support_2)) {
  if (payoff_1_.rows() == 0 || payoff_1_.cols() == 0) {
    throw ModelError("MatrixGame: empty payoff matrix");
  }
  if (payoff_1_.rows() != payoff_2_.rows() ||
      payoff_1_.cols() != payoff_2_.cols()) {
    throw ModelError("MatrixGame: payoff matrices differ in shape");
  }
  for (double v : payoff_1_.data()) {
    if (!std::isfinite(v)) throw ModelError("MatrixGame: non-finite payoff");
  }
  for (double v : payoff_2_.data()) {
    if (!std::isfinite(v)) throw ModelError("MatrixGame: non-finite payoff");
  }
  if (!support_1_) support_1_ = Support::Atoms(payoff_1_.rows());
  if (!support_2_) support_2_ = Support::Atoms(payoff_1_.cols());
  if (support_1_->size() != payoff_1_.rows() ||
      support_2_->size() != payoff_1_.cols()) {
    throw SupportMismatchError("MatrixGame: supports do not match payoffs");
  }
  const double observed = std::max(payoff_1_.max_abs(), payoff_2_.max_abs());
  r_max_ = r_max.value_or(observed);
  if (observed > r_max_ * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "MatrixGame: payoff magnitude " << observed
        << " exceeds declared R_max " << r_max_;
    throw ModelError(msg.str());
  }
}

MatrixGame MatrixGame::ZeroSum(Matrix payoff_1, std::optional<double> r_max,
                               SupportPtr support_1, SupportPtr support_2) {
  Matrix payoff_2(payoff_1.rows(), payoff_1.cols());
  for (std::size_t i = 0; i < payoff_1.rows(); ++i) {
    for (std::size_t j = 0; j < payoff_1.cols(); ++j) {
      payoff_2(i, j) = -payoff_1(i, j);
    }
  }
  return MatrixGame(std::move(payoff_1), std::move(payoff_2), true, r_max,
                    std::move(support_1), std::move(support_2));
}

MatrixGame MatrixGame::GeneralSum(Matrix payoff_1, Matrix payoff_2,
                                  std::optional<double> r_max,
                                  SupportPtr support_1, SupportPtr support_2) {
  return MatrixGame(std::move(payoff_1), std::move(payoff_2), false, r_max,
                    std::move(support_1), std::move(support_2));
}

MatrixGame MatrixGame::SingleAgent(std::span<const double> values,
                                   SupportPtr support) {
  Matrix payoff(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) payoff(i, 0) = values[i];
  return ZeroSum(std::move(payoff), std::nullopt, std::move(support),
                 Support::Atoms(1));
}

MatrixGame MatrixGame::Shifted(double c) const {
  Matrix p1 = payoff_1_;
  Matrix p2 = payoff_2_;
  for (std::size_t i = 0; i < p1.rows(); ++i) {
    for (std::size_t j = 0; j < p1.cols(); ++j) {
      p1(i, j) += c;
      p2(i, j) += c;
    }
  }
  const bool still_zero_sum = zero_sum_ && c == 0.0;
  return MatrixGame(std::move(p1), std::move(p2), still_zero_sum, std::nullopt,
                    support_1_, support_2_);
}

MatrixGame MatchingPennies() {
  return MatrixGame::ZeroSum(Matrix::FromRows({{1.0, -1.0}, {-1.0, 1.0}}));
}

MatrixGame RockPaperScissors() {
  return MatrixGame::ZeroSum(Matrix::FromRows(
      {{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}}));
}

JointPolicy UniformJointPolicy(const MatrixGame& game) {
  return {Density::Uniform(game.support(Player::kOne)),
          Density::Uniform(game.support(Player::kTwo))};
}

ValueVector MarginalQ(const MatrixGame& game, Player player,
                      const Density& opponent) {
  RequireSameSupport(opponent.support(), game.support(Opponent(player)),
                     "MarginalQ");
  const Matrix& payoff = game.payoff(player);
  if (player == Player::kOne) {
    ValueVector nu(payoff.rows(), 0.0);
    for (std::size_t j = 0; j < payoff.cols(); ++j) {
      const double w = opponent.mass(j);
      for (std::size_t i = 0; i < payoff.rows(); ++i) nu[i] += w * payoff(i, j);
    }
    return nu;
  }
  ValueVector nu(payoff.cols(), 0.0);
  for (std::size_t i = 0; i < payoff.rows(); ++i) {
    const double w = opponent.mass(i);
    for (std::size_t j = 0; j < payoff.cols(); ++j) nu[j] += w * payoff(i, j);
  }
  return nu;
}

double ExpectedPayoff(const MatrixGame& game, Player player,
                      const Density& pi_1, const Density& pi_2) {
  if (player == Player::kOne) {
    return Inner(pi_1, MarginalQ(game, Player::kOne, pi_2));
  }
  return Inner(pi_2, MarginalQ(game, Player::kTwo, pi_1));
}

double Box::max_abs_coordinate() const {
  double m = 0.0;
  for (double v : lows) m = std::max(m, std::abs(v));
  for (double v : highs) m = std::max(m, std::abs(v));
  return m;
}

namespace {

double Scalar(const KernelParams& params, const std::string& key,
              double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) {
    throw ConfigError("kernel parameter '" + key + "' must be a scalar");
  }
  return it->second.front();
}

void RequireKnownKeys(const KernelParams& params,
                      std::initializer_list<std::string_view> allowed,
                      std::string_view name) {
  for (const auto& [key, unused] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("kernel '" + std::string(name) +
                        "': unknown parameter '" + key + "'");
    }
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double SquaredNorm(std::span<const double> a) { return Dot(a, a); }

double Sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

}  // namespace

KernelGame BuiltinKernelGame(std::string_view name,
                             const KernelParams& params) {
  const int dim = static_cast<int>(Scalar(params, "dim", 1.0));
  const double low = Scalar(params, "low", -1.0);
  const double high = Scalar(params, "high", 1.0);
  if (dim < 1) throw ConfigError("kernel dim must be >= 1");
  if (!(high > low)) throw ConfigError("kernel box needs low < high");

  KernelGame game;
  game.name = std::string(name);
  game.box_1 = {std::vector<double>(dim, low), std::vector<double>(dim, high)};
  game.box_2 = game.box_1;
  const double bound = game.box_1.max_abs_coordinate();

  double derived_r_max = 0.0;
  if (name == "bilinear") {
    RequireKnownKeys(params, {"dim", "low", "high", "r_max", "scale"}, name);
    const double scale = Scalar(params, "scale", 1.0);
    game.kernel = [scale](std::span<const double> a1,
                          std::span<const double> a2) {
      return scale * Dot(a1, a2);
    };
    derived_r_max = std::abs(scale) * dim * bound * bound;
  } else if (name == "saddle") {
    RequireKnownKeys(params,
                     {"dim", "low", "high", "r_max", "coupling", "curvature",
                      "shift_1", "shift_2"},
                     name);
    const double coupling = Scalar(params, "coupling", 1.0);
    const double curvature = Scalar(params, "curvature", 0.5);
    const double shift_1 = Scalar(params, "shift_1", 0.0);
    const double shift_2 = Scalar(params, "shift_2", 0.0);
    game.kernel = [=](std::span<const double> a1, std::span<const double> a2) {
      return coupling * Dot(a1, a2) - curvature * SquaredNorm(a1) +
             curvature * SquaredNorm(a2) + shift_1 * Sum(a1) +
             shift_2 * Sum(a2);
    };
    derived_r_max = dim * ((std::abs(coupling) + 2.0 * std::abs(curvature)) *
                               bound * bound +
                           (std::abs(shift_1) + std::abs(shift_2)) * bound);
  } else if (name == "polynomial") {
    RequireKnownKeys(params,
                     {"low", "high", "r_max", "degree_1", "degree_2",
                      "coefficients", "dim"},
                     name);
    if (dim != 1) throw ConfigError("polynomial kernel is one-dimensional");
    const int deg_1 = static_cast<int>(Scalar(params, "degree_1", 1.0));
    const int deg_2 = static_cast<int>(Scalar(params, "degree_2", 1.0));
    if (deg_1 < 0 || deg_2 < 0) {
      throw ConfigError("polynomial degrees must be non-negative");
    }
    auto it = params.find("coefficients");
    if (it == params.end() ||
        it->second.size() != static_cast<std::size_t>((deg_1 + 1) * (deg_2 + 1))) {
      throw ConfigError(
          "polynomial kernel needs (degree_1 + 1) * (degree_2 + 1) "
          "coefficients");
    }
    std::vector<double> coeff = it->second;
    game.kernel = [coeff, deg_1, deg_2](std::span<const double> a1,
                                        std::span<const double> a2) {
      double q = 0.0;
      double p1 = 1.0;
      for (int i = 0; i <= deg_1; ++i) {
        double p2 = 1.0;
        for (int j = 0; j <= deg_2; ++j) {
          q += coeff[i * (deg_2 + 1) + j] * p1 * p2;
          p2 *= a2[0];
        }
        p1 *= a1[0];
      }
      return q;
    };
    for (int i = 0; i <= deg_1; ++i) {
      for (int j = 0; j <= deg_2; ++j) {
        derived_r_max += std::abs(coeff[i * (deg_2 + 1) + j]) *
                         std::pow(bound, i) * std::pow(bound, j);
      }
    }
  } else if (name == "constant") {
    RequireKnownKeys(params, {"dim", "low", "high", "r_max", "value"}, name);
    const double value = Scalar(params, "value", 0.0);
    game.kernel = [value](std::span<const double>, std::span<const double>) {
      return value;
    };
    derived_r_max = std::abs(value);
  } else {
    throw ConfigError("unknown kernel game '" + std::string(name) + "'");
  }
  game.r_max = Scalar(params, "r_max", derived_r_max);
  if (!(game.r_max >= 0.0)) throw ConfigError("kernel r_max must be >= 0");
  return game;
}

std::vector<std::string> BuiltinKernelNames() {
  return {"bilinear", "saddle", "polynomial", "constant"};
}

MatrixGame Discretize(const KernelGame& game, std::span<const int> resolution_1,
                      std::span<const int> resolution_2) {
  for (int r : resolution_1) {
    if (r < 2) throw ConfigError("Discretize: resolution must be >= 2");
  }
  for (int r : resolution_2) {
    if (r < 2) throw ConfigError("Discretize: resolution must be >= 2");
  }
  SupportPtr s1 = Support::Grid(game.box_1.lows, game.box_1.highs, resolution_1);
  SupportPtr s2 = Support::Grid(game.box_2.lows, game.box_2.highs, resolution_2);
  Matrix payoff(s1->size(), s2->size());
  for (std::size_t i = 0; i < s1->size(); ++i) {
    for (std::size_t j = 0; j < s2->size(); ++j) {
      const double q = game.kernel(s1->cell(i).center, s2->cell(j).center);
      if (!std::isfinite(q)) {
        std::ostringstream msg;
        msg << "kernel '" << game.name << "' is non-finite at cell (" << i
            << ", " << j << ")";
        throw KernelDomainError(msg.str());
      }
      payoff(i, j) = q;
    }
  }
  return MatrixGame::ZeroSum(std::move(payoff), game.r_max, std::move(s1),
                             std::move(s2));
}

MatrixGame Discretize(const KernelGame& game, int resolution) {
  std::vector<int> r1(game.box_1.dimension(), resolution);
  std::vector<int> r2(game.box_2.dimension(), resolution);
  return Discretize(game, r1, r2);
}

TabularSG::TabularSG(int num_states, int num_actions_1, int num_actions_2,
                     std::vector<double> transition,
                     std::vector<double> rewards, double gamma,
                     std::vector<int> terminal_states,
                     std::optional<double> r_max)
    : num_states_(num_states),
      num_actions_1_(num_actions_1),
      num_actions_2_(num_actions_2),
      transition_(std::move(transition)),
      rewards_(std::move(rewards)),
      gamma_(gamma) {
  if (num_states_ < 1 || num_actions_1_ < 1 || num_actions_2_ < 1) {
    throw ModelError("TabularSG: need at least one state and one action each");
  }
  const std::size_t n_sa = static_cast<std::size_t>(num_states_) *
                           num_actions_1_ * num_actions_2_;
  if (rewards_.size() != n_sa) {
    throw ModelError("TabularSG: reward table has the wrong size");
  }
  if (transition_.size() != n_sa * num_states_) {
    throw ModelError("TabularSG: transition table has the wrong size");
  }
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
    throw ModelError("TabularSG: gamma must lie in [0, 1)");
  }
  for (std::size_t k = 0; k < n_sa; ++k) {
    double sum = 0.0;
    for (int t = 0; t < num_states_; ++t) {
      const double p = transition_[k * num_states_ + t];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ModelError("TabularSG: transition probabilities must be >= 0");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "TabularSG: transition row " << k << " sums to " << sum;
      throw ModelError(msg.str());
    }
    if (!std::isfinite(rewards_[k])) {
      throw ModelError("TabularSG: non-finite reward");
    }
  }
  terminal_.assign(num_states_, false);
  for (int s : terminal_states) {
    if (s < 0 || s >= num_states_) {
      throw ModelError("TabularSG: terminal state out of range");
    }
    terminal_[s] = true;
  }
  double observed = 0.0;
  for (double r : rewards_) observed = std::max(observed, std::abs(r));
  r_max_ = r_max.value_or(observed);
  if (observed > r_max_ * (1.0 + 1e-12)) {
    throw ModelError("TabularSG: reward magnitude exceeds declared R_max");
  }
  support_1_ = Support::Atoms(num_actions_1_);
  support_2_ = Support::Atoms(num_actions_2_);
}

std::vector<int> TabularSG::terminal_states() const {
  std::vector<int> out;
  for (int s = 0; s < num_states_; ++s) {
    if (terminal_[s]) out.push_back(s);
  }
  return out;
}

}  // namespace porl
