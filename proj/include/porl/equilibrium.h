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

#ifndef PORL_EQUILIBRIUM_H_
#define PORL_EQUILIBRIUM_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "porl/density.h"
#include "porl/games.h"

namespace porl {

// The entropy-regularized best response: density proportional to
// exp(values / alpha), normalized against the cell measures. This is the
// maximizer of <g, values> + alpha * H(g) over densities g.
Density SoftOptimal(SupportPtr support, std::span<const double> values,
                    double alpha);

// Each player's soft-optimal response to the other's current density.
JointPolicy LogitResponse(const MatrixGame& game, const JointPolicy& pi,
                          double alpha);

// max over players of the sup-norm distance between pi_i and its logit
// response (density values, not masses).
double QreResidual(const MatrixGame& game, const JointPolicy& pi, double alpha);

struct QreOptions {
  double tol = 1e-10;
  long max_iters = 1'000'000;
  // Weight on the logit response in pi <- (1 - damping) pi + damping logit(pi).
  double damping = 0.5;
  // Halve the damping weight whenever the residual fails to shrink over a
  // window of iterations. Disable to run the fixed-weight iteration.
  bool adaptive_damping = true;
  std::optional<JointPolicy> initial;
};

struct QreSolution {
  JointPolicy policy;
  double residual = 0.0;
  double alpha = 0.0;
  long iterations_used = 0;
};

// Quantal response equilibrium at temperature alpha by damped logit
// fixed-point iteration (both players updated simultaneously). Throws
// ConvergenceError carrying the last residual when max_iters is exhausted.
QreSolution QreSolve(const MatrixGame& game, double alpha,
                     const QreOptions& options = {});

// Pure best response cell of `player` against `opponent`; ties go to the
// lowest index.
std::size_t BestResponse(const MatrixGame& game, Player player,
                         const Density& opponent);

struct ExploitabilityGains {
  double player_1 = 0.0;
  double player_2 = 0.0;

  double total() const { return player_1 + player_2; }
};

// Per-player gain of a pure best response over the player's own mixture.
ExploitabilityGains PerPlayerExploitability(const MatrixGame& game,
                                            const JointPolicy& pi);

// NashConv: sum of both players' best-response gains. Non-negative; zero
// exactly at a Nash equilibrium.
double Exploitability(const MatrixGame& game, const JointPolicy& pi);

// Score of `row` against `col`: player 1 of `row` facing player 2 of `col`,
// plus player 2 of `row` facing player 1 of `col`, each scored with the
// payoff of the `row` seat.
double CrossPlayScore(const MatrixGame& game, const JointPolicy& row,
                      const JointPolicy& col);

// scores[i][j] = CrossPlayScore(policy_i, policy_j) with index 0 = A, 1 = B.
using CrossPlayTable = std::array<std::array<double, 2>, 2>;

CrossPlayTable CrossPlay(const MatrixGame& game, const JointPolicy& a,
                         const JointPolicy& b);

}  // namespace porl

#endif  // PORL_EQUILIBRIUM_H_
