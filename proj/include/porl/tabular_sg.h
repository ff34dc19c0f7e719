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

#ifndef PORL_TABULAR_SG_H_
#define PORL_TABULAR_SG_H_

#include <optional>
#include <vector>

#include "porl/games.h"
#include "porl/trajectory.h"

namespace porl {

// Player-1 action values Q(s, a1, a2); player 2's values are the negation.
class TabularQ {
 public:
  explicit TabularQ(const TabularSG& sg);

  double operator()(int s, int a1, int a2) const {
    return values_[(static_cast<std::size_t>(s) * d1_ + a1) * d2_ + a2];
  }
  double& operator()(int s, int a1, int a2) {
    return values_[(static_cast<std::size_t>(s) * d1_ + a1) * d2_ + a2];
  }
  int num_states() const { return num_states_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double max_abs() const;

  // Zero-sum matrix game with payoff_1 = Q(s, ., .).
  MatrixGame StageGame(int s) const;

 private:
  int num_states_;
  int d1_;
  int d2_;
  std::vector<double> values_;
};

// One joint policy per state.
using StatePolicy = std::vector<JointPolicy>;

StatePolicy UniformStatePolicy(const TabularSG& sg);

struct Algorithm1Config {
  double eta = 10.0;
  double alpha = 0.2;
  // Maximum soft Bellman sweeps per evaluation.
  long eval_sweeps = 100000;
  // Closed-form regularized-leader steps per outer round, each against the
  // same evaluated Q.
  long improve_steps = 1;
  long outer_iterations = 100;
  // Weight of the freshly computed backup when refreshing the target table:
  // target <- (1 - damping_tau) * target + damping_tau * backup.
  double damping_tau = 1.0;
  double eval_tol = 1e-12;

  void Validate() const;
};

struct EvaluationResult {
  TabularQ q;
  long sweeps = 0;
  // Sup-norm change of every sweep.
  std::vector<double> deltas;
  bool converged = false;
};

// Soft value of state s under `pi` in the player-1 convention:
//   E_{a ~ pi}[Q(s, a)] + alpha * H(pi_1(s)) - alpha * H(pi_2(s)).
double SoftStateValue(const TabularSG& sg, const TabularQ& q,
                      const JointPolicy& pi, double alpha, int s);

// Iterates the exact-expectation soft Bellman operator
//   Q(s, a) <- r(s, a) + gamma * sum_{s'} P(s' | s, a) V_soft(s')
// with V_soft = 0 for terminal successors and Q(s, .) = r(s, .) at terminal
// states. Stops when the sup-norm change is <= eval_tol or after
// eval_sweeps sweeps. `warm_start` seeds the target table.
EvaluationResult SoftPolicyEvaluation(
    const TabularSG& sg, const StatePolicy& pi, const Algorithm1Config& config,
    const std::optional<TabularQ>& warm_start = std::nullopt);

// Applies `steps` mirror-descent steps to every stage game Q(s, ., .),
// starting from pi_t(s); each step is anchored at the previous one.
StatePolicy PerStateImprove(const TabularSG& sg, const StatePolicy& pi_t,
                            const TabularQ& q, double eta, double alpha,
                            long steps = 1);

// Entropy-regularized equilibrium of the whole game by value iteration on
// stage-game QREs: Q <- r + gamma * P V, where V(s) is the soft saddle value
// of Q(s, ., .) at its QRE. Throws ConvergenceError when max_sweeps runs out.
struct RegularizedEquilibrium {
  StatePolicy policy;
  TabularQ q;
  long sweeps = 0;
  double residual = 0.0;
};
RegularizedEquilibrium SolveRegularizedEquilibrium(const TabularSG& sg,
                                                   double alpha,
                                                   double tol = 1e-12,
                                                   long max_sweeps = 100000);

struct Algorithm1Result {
  StatePolicy policy;
  TabularQ q;
  Trajectory trajectory;
};

// Alternates soft evaluation and per-state improvement for
// outer_iterations rounds. Records, per round: max per-state KL to
// `reference`, max per-state stage-game exploitability, both entropies and
// the soft value at `initial_state`.
Algorithm1Result RunAlgorithm1(
    const TabularSG& sg, const Algorithm1Config& config,
    const std::optional<StatePolicy>& reference = std::nullopt,
    int initial_state = 0,
    const std::optional<StatePolicy>& initial_policy = std::nullopt);

}  // namespace porl

#endif  // PORL_TABULAR_SG_H_
