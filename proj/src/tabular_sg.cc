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

#include "porl/tabular_sg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "porl/dynamics.h"
#include "porl/equilibrium.h"
#include "porl/error.h"

namespace porl {

TabularQ::TabularQ(const TabularSG& sg)
    : num_states_(sg.num_states()),
      d1_(sg.num_actions(Player::kOne)),
      d2_(sg.num_actions(Player::kTwo)),
      values_(static_cast<std::size_t>(num_states_) * d1_ * d2_, 0.0) {}

double TabularQ::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

MatrixGame TabularQ::StageGame(int s) const {
  Matrix payoff(d1_, d2_);
  for (int a1 = 0; a1 < d1_; ++a1) {
    for (int a2 = 0; a2 < d2_; ++a2) payoff(a1, a2) = (*this)(s, a1, a2);
  }
  return MatrixGame::ZeroSum(std::move(payoff));
}

StatePolicy UniformStatePolicy(const TabularSG& sg) {
  StatePolicy pi;
  pi.reserve(sg.num_states());
  for (int s = 0; s < sg.num_states(); ++s) {
    pi.push_back({Density::Uniform(sg.support(Player::kOne)),
                  Density::Uniform(sg.support(Player::kTwo))});
  }
  return pi;
}

void Algorithm1Config::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("algorithm1: eta must be positive and finite");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("algorithm1: alpha must be non-negative");
  }
  if (eval_sweeps < 1 || improve_steps < 1 || outer_iterations < 0) {
    throw ConfigError(
        "algorithm1: eval_sweeps and improve_steps must be >= 1, "
        "outer_iterations >= 0");
  }
  if (!(damping_tau > 0.0 && damping_tau <= 1.0)) {
    throw ConfigError("algorithm1: damping_tau must lie in (0, 1]");
  }
  if (!(eval_tol >= 0.0)) throw ConfigError("algorithm1: eval_tol must be >= 0");
}

namespace {

void CheckPolicy(const TabularSG& sg, const StatePolicy& pi) {
  if (static_cast<int>(pi.size()) != sg.num_states()) {
    throw SupportMismatchError("state policy size differs from state count");
  }
  for (const JointPolicy& p : pi) {
    RequireSameSupport(p.player_1.support(), sg.support(Player::kOne),
                       "state policy");
    RequireSameSupport(p.player_2.support(), sg.support(Player::kTwo),
                       "state policy");
  }
}

}  // namespace

double SoftStateValue(const TabularSG& sg, const TabularQ& q,
                      const JointPolicy& pi, double alpha, int s) {
  const int d1 = sg.num_actions(Player::kOne);
  const int d2 = sg.num_actions(Player::kTwo);
  double v = 0.0;
  for (int a1 = 0; a1 < d1; ++a1) {
    const double p1 = pi.player_1.mass(a1);
    for (int a2 = 0; a2 < d2; ++a2) {
      v += p1 * pi.player_2.mass(a2) * q(s, a1, a2);
    }
  }
  return v + alpha * (Entropy(pi.player_1) - Entropy(pi.player_2));
}

EvaluationResult SoftPolicyEvaluation(const TabularSG& sg,
                                      const StatePolicy& pi,
                                      const Algorithm1Config& config,
                                      const std::optional<TabularQ>& warm_start) {
  config.Validate();
  CheckPolicy(sg, pi);
  EvaluationResult result{warm_start.value_or(TabularQ(sg)), 0, {}, false};
  if (result.q.num_states() != sg.num_states() ||
      result.q.values().size() != TabularQ(sg).values().size()) {
    throw SupportMismatchError("SoftPolicyEvaluation: warm start shape");
  }
  const int n = sg.num_states();
  const int d1 = sg.num_actions(Player::kOne);
  const int d2 = sg.num_actions(Player::kTwo);
  const double tau = config.damping_tau;

  std::vector<double> v_next(n, 0.0);
  TabularQ backup(sg);
  for (long sweep = 0; sweep < config.eval_sweeps; ++sweep) {
    // Synchronous update: every backup reads the previous target table.
    for (int s = 0; s < n; ++s) {
      v_next[s] = sg.is_terminal(s)
                      ? 0.0
                      : SoftStateValue(sg, result.q, pi[s], config.alpha, s);
    }
    double delta = 0.0;
    for (int s = 0; s < n; ++s) {
      for (int a1 = 0; a1 < d1; ++a1) {
        for (int a2 = 0; a2 < d2; ++a2) {
          double target = sg.reward(s, a1, a2);
          if (!sg.is_terminal(s)) {
            const auto row = sg.transition(s, a1, a2);
            double cont = 0.0;
            for (int t = 0; t < n; ++t) cont += row[t] * v_next[t];
            target += sg.gamma() * cont;
          }
          const double old = result.q(s, a1, a2);
          const double mixed = (1.0 - tau) * old + tau * target;
          backup(s, a1, a2) = mixed;
          delta = std::max(delta, std::abs(mixed - old));
        }
      }
    }
    std::swap(result.q.values(), backup.values());
    result.deltas.push_back(delta);
    result.sweeps = sweep + 1;
    if (!std::isfinite(delta)) {
      throw ValueError("SoftPolicyEvaluation: values diverged");
    }
    if (delta <= config.eval_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

StatePolicy PerStateImprove(const TabularSG& sg, const StatePolicy& pi_t,
                            const TabularQ& q, double eta, double alpha,
                            long steps) {
  CheckPolicy(sg, pi_t);
  if (steps < 1) throw ConfigError("PerStateImprove: steps must be >= 1");
  StatePolicy next;
  next.reserve(pi_t.size());
  for (int s = 0; s < sg.num_states(); ++s) {
    const MatrixGame stage = q.StageGame(s);
    JointPolicy pi = pi_t[s];
    for (long k = 0; k < steps; ++k) pi = MdStep(pi, stage, eta, alpha);
    next.push_back(std::move(pi));
  }
  return next;
}

RegularizedEquilibrium SolveRegularizedEquilibrium(const TabularSG& sg,
                                                   double alpha, double tol,
                                                   long max_sweeps) {
  if (!(alpha > 0.0)) {
    throw ConfigError("regularized equilibrium: alpha must be positive");
  }
  const int n = sg.num_states();
  const int d1 = sg.num_actions(Player::kOne);
  const int d2 = sg.num_actions(Player::kTwo);
  RegularizedEquilibrium eq{UniformStatePolicy(sg), TabularQ(sg), 0, 0.0};
  QreOptions qre;
  qre.tol = std::min(1e-13, tol);
  std::vector<double> v(n, 0.0);
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int s = 0; s < n; ++s) {
      qre.initial = eq.policy[s];
      eq.policy[s] = QreSolve(eq.q.StageGame(s), alpha, qre).policy;
      v[s] = sg.is_terminal(s)
                 ? 0.0
                 : SoftStateValue(sg, eq.q, eq.policy[s], alpha, s);
    }
    double delta = 0.0;
    for (int s = 0; s < n; ++s) {
      for (int a1 = 0; a1 < d1; ++a1) {
        for (int a2 = 0; a2 < d2; ++a2) {
          double target = sg.reward(s, a1, a2);
          if (!sg.is_terminal(s)) {
            const auto row = sg.transition(s, a1, a2);
            double cont = 0.0;
            for (int t = 0; t < n; ++t) cont += row[t] * v[t];
            target += sg.gamma() * cont;
          }
          delta = std::max(delta, std::abs(target - eq.q(s, a1, a2)));
          eq.q(s, a1, a2) = target;
        }
      }
    }
    eq.sweeps = sweep + 1;
    eq.residual = delta;
    if (delta <= tol) {
      for (int s = 0; s < n; ++s) {
        qre.initial = eq.policy[s];
        eq.policy[s] = QreSolve(eq.q.StageGame(s), alpha, qre).policy;
      }
      return eq;
    }
  }
  std::ostringstream msg;
  msg << "regularized equilibrium: no convergence after " << max_sweeps
      << " sweeps (residual " << eq.residual << ")";
  throw ConvergenceError(msg.str(), eq.residual);
}

namespace {

TrajectoryPoint MeasureRound(const TabularSG& sg, const StatePolicy& pi,
                             const TabularQ& q, double alpha,
                             const std::optional<StatePolicy>& reference,
                             int initial_state, long t) {
  TrajectoryPoint p;
  p.t = t;
  p.kl_to_reference = std::numeric_limits<double>::quiet_NaN();
  if (reference) {
    double worst = 0.0;
    for (int s = 0; s < sg.num_states(); ++s) {
      worst = std::max(worst, JointKl((*reference)[s], pi[s]));
    }
    p.kl_to_reference = worst;
  }
  double expl = 0.0;
  for (int s = 0; s < sg.num_states(); ++s) {
    expl = std::max(expl, Exploitability(q.StageGame(s), pi[s]));
  }
  p.exploitability = expl;
  p.entropy_1 = Entropy(pi[initial_state].player_1);
  p.entropy_2 = Entropy(pi[initial_state].player_2);
  p.value = SoftStateValue(sg, q, pi[initial_state], alpha, initial_state);
  return p;
}

}  // namespace

Algorithm1Result RunAlgorithm1(const TabularSG& sg,
                               const Algorithm1Config& config,
                               const std::optional<StatePolicy>& reference,
                               int initial_state,
                               const std::optional<StatePolicy>& initial_policy) {
  config.Validate();
  if (initial_state < 0 || initial_state >= sg.num_states()) {
    throw ConfigError("RunAlgorithm1: initial_state out of range");
  }
  if (reference) CheckPolicy(sg, *reference);
  StatePolicy pi = initial_policy.value_or(UniformStatePolicy(sg));
  CheckPolicy(sg, pi);

  Trajectory trajectory;
  long unconverged = 0;
  std::optional<TabularQ> q;
  for (long t = 0;; ++t) {
    EvaluationResult eval = SoftPolicyEvaluation(sg, pi, config, q);
    if (!eval.converged) ++unconverged;
    q = std::move(eval.q);
    trajectory.iterates.push_back(
        MeasureRound(sg, pi, *q, config.alpha, reference, initial_state, t));
    for (const JointPolicy& p : pi) {
      trajectory.max_density =
          std::max({trajectory.max_density, p.player_1.max_value(),
                    p.player_2.max_value()});
    }
    if (t == config.outer_iterations) break;
    pi = PerStateImprove(sg, pi, *q, config.eta, config.alpha,
                         config.improve_steps);
  }
  if (unconverged > 0) {
    std::ostringstream msg;
    msg << "soft policy evaluation hit eval_sweeps before eval_tol in "
        << unconverged << " round(s)";
    trajectory.warnings.push_back(msg.str());
  }
  trajectory.final_policy = pi[initial_state];
  return {std::move(pi), std::move(*q), std::move(trajectory)};
}

}  // namespace porl
