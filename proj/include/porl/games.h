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

#ifndef PORL_GAMES_H_
#define PORL_GAMES_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "porl/density.h"

namespace porl {

using ValueVector = std::vector<double>;

enum class Player { kOne = 0, kTwo = 1 };

inline Player Opponent(Player p) {
  return p == Player::kOne ? Player::kTwo : Player::kOne;
}

// Dense row-major matrix; rows index player 1's cells, columns player 2's.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  std::span<const double> data() const { return data_; }
  double max_abs() const;
  std::vector<std::vector<double>> ToRows() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A joint policy: one density per player, each on that player's support.
struct JointPolicy {
  Density player_1;
  Density player_2;

  const Density& of(Player p) const {
    return p == Player::kOne ? player_1 : player_2;
  }
};

// Two-player normal-form game over finite supports. Supports default to
// unit-measure atoms; discretized kernel games carry grid supports so that
// measure-weighted sums approximate integrals over the action boxes.
//
// Single-agent problems are MatrixGames with one column: the opponent has a
// single unit-measure action and its density is trivially 1.
class MatrixGame {
 public:
  // payoff_2 = -payoff_1.
  static MatrixGame ZeroSum(Matrix payoff_1,
                            std::optional<double> r_max = std::nullopt,
                            SupportPtr support_1 = nullptr,
                            SupportPtr support_2 = nullptr);

  static MatrixGame GeneralSum(Matrix payoff_1, Matrix payoff_2,
                               std::optional<double> r_max = std::nullopt,
                               SupportPtr support_1 = nullptr,
                               SupportPtr support_2 = nullptr);

  // One-column zero-sum game whose row payoffs are `values`.
  static MatrixGame SingleAgent(std::span<const double> values,
                                SupportPtr support = nullptr);

  const Matrix& payoff(Player p) const {
    return p == Player::kOne ? payoff_1_ : payoff_2_;
  }
  const Matrix& payoff_1() const { return payoff_1_; }
  const Matrix& payoff_2() const { return payoff_2_; }
  bool zero_sum() const { return zero_sum_; }
  double r_max() const { return r_max_; }
  const SupportPtr& support(Player p) const {
    return p == Player::kOne ? support_1_ : support_2_;
  }
  std::size_t num_actions(Player p) const { return support(p)->size(); }

  // Same game with `c` added to every payoff of both players. The result is
  // general-sum unless c == 0.
  MatrixGame Shifted(double c) const;

 private:
  MatrixGame(Matrix payoff_1, Matrix payoff_2, bool zero_sum,
             std::optional<double> r_max, SupportPtr support_1,
             SupportPtr support_2);

  Matrix payoff_1_;
  Matrix payoff_2_;
  bool zero_sum_ = true;
  double r_max_ = 0.0;
  SupportPtr support_1_;
  SupportPtr support_2_;
};

MatrixGame MatchingPennies();
MatrixGame RockPaperScissors();

JointPolicy UniformJointPolicy(const MatrixGame& game);

// nu(a_i) = sum_j opponent(a_j) * measure_j * payoff_i(a_i, a_j): player i's
// expected payoff of each own cell against the opponent density.
ValueVector MarginalQ(const MatrixGame& game, Player player,
                      const Density& opponent);

// Expected payoff of `player` when player 1 plays pi_1 and player 2 pi_2.
double ExpectedPayoff(const MatrixGame& game, Player player,
                      const Density& pi_1, const Density& pi_2);

// Compact axis-aligned box.
struct Box {
  std::vector<double> lows;
  std::vector<double> highs;

  std::size_t dimension() const { return lows.size(); }
  double max_abs_coordinate() const;
};

using Kernel =
    std::function<double(std::span<const double>, std::span<const double>)>;

// Two-player zero-sum game with a payoff kernel Q(a1, a2) on compact boxes.
struct KernelGame {
  std::string name;
  Kernel kernel;
  Box box_1;
  Box box_2;
  double r_max = 1.0;
};

// Named kernel parameters; scalars are one-element vectors.
using KernelParams = std::map<std::string, std::vector<double>>;

// Registry of built-in kernels:
//   "bilinear"   q = scale * <a1, a2>
//   "saddle"     q = coupling * <a1, a2> - curvature * |a1|^2
//                    + curvature * |a2|^2 + shift_1 * sum(a1) + shift_2 * sum(a2)
//   "polynomial" 1-D, q = sum_{i,j} coefficients[i * (degree_2 + 1) + j]
//                    * a1^i * a2^j
//   "constant"   q = value
// Common parameters: dim (default 1), low (-1), high (1), r_max (derived
// bound when omitted).
KernelGame BuiltinKernelGame(std::string_view name,
                             const KernelParams& params = {});

std::vector<std::string> BuiltinKernelNames();

// Evaluates the kernel at the midpoint cells of both boxes. Every axis needs
// resolution >= 2. The result is zero-sum and carries grid supports.
MatrixGame Discretize(const KernelGame& game, std::span<const int> resolution_1,
                      std::span<const int> resolution_2);
MatrixGame Discretize(const KernelGame& game, int resolution);

// Tabular two-player zero-sum stochastic game. Rewards are player 1's;
// player 2 receives the negation. Every state has the same action counts.
class TabularSG {
 public:
  // transition is indexed [s][a1][a2][s'] and rewards [s][a1][a2], both
  // flattened row-major.
  TabularSG(int num_states, int num_actions_1, int num_actions_2,
            std::vector<double> transition, std::vector<double> rewards,
            double gamma, std::vector<int> terminal_states,
            std::optional<double> r_max = std::nullopt);

  int num_states() const { return num_states_; }
  int num_actions(Player p) const {
    return p == Player::kOne ? num_actions_1_ : num_actions_2_;
  }
  double gamma() const { return gamma_; }
  double r_max() const { return r_max_; }
  // L = R_max / (1 - gamma).
  double value_bound() const { return r_max_ / (1.0 - gamma_); }
  bool is_terminal(int s) const { return terminal_[s]; }
  std::vector<int> terminal_states() const;

  double reward(int s, int a1, int a2) const {
    return rewards_[Index(s, a1, a2)];
  }
  std::span<const double> transition(int s, int a1, int a2) const {
    return std::span<const double>(transition_).subspan(
        Index(s, a1, a2) * num_states_, num_states_);
  }
  std::span<const double> transition_data() const { return transition_; }
  std::span<const double> reward_data() const { return rewards_; }

  const SupportPtr& support(Player p) const {
    return p == Player::kOne ? support_1_ : support_2_;
  }

  std::size_t Index(int s, int a1, int a2) const {
    return (static_cast<std::size_t>(s) * num_actions_1_ + a1) *
               num_actions_2_ +
           a2;
  }

 private:
  int num_states_;
  int num_actions_1_;
  int num_actions_2_;
  std::vector<double> transition_;
  std::vector<double> rewards_;
  double gamma_;
  std::vector<bool> terminal_;
  double r_max_;
  SupportPtr support_1_;
  SupportPtr support_2_;
};

}  // namespace porl

#endif  // PORL_GAMES_H_
