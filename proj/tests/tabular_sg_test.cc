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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "porl/dynamics.h"
#include "porl/equilibrium.h"
#include "porl/error.h"

namespace porl {
namespace {

// Three-state single-agent chain with deterministic moves. Action 0 advances,
// action 1 stays (state 0) or falls back (state 1); state 2 is terminal.
oracle::DenseMdp ChainMdp(double gamma) {
  oracle::DenseMdp m;
  m.states = 3;
  m.actions = 2;
  m.gamma = gamma;
  m.transition = {{{0, 1, 0}, {1, 0, 0}},
                  {{0, 0, 1}, {1, 0, 0}},
                  {{0, 0, 1}, {0, 0, 1}}};
  m.reward = {{0.0, 0.1}, {1.0, -0.2}, {0.5, 0.5}};
  m.terminal = {false, false, true};
  return m;
}

TabularSG ToSingleAgent(const oracle::DenseMdp& m) {
  std::vector<double> transition;
  std::vector<double> rewards;
  std::vector<int> terminals;
  for (int s = 0; s < m.states; ++s) {
    if (m.terminal[s]) terminals.push_back(s);
    for (int a = 0; a < m.actions; ++a) {
      transition.insert(transition.end(), m.transition[s][a].begin(),
                        m.transition[s][a].end());
      rewards.push_back(m.reward[s][a]);
    }
  }
  return TabularSG(m.states, m.actions, 1, transition, rewards, m.gamma,
                   terminals);
}

// One-state game that loops to itself; with gamma = 0 only r matters.
TabularSG SingleState(const std::vector<std::vector<double>>& payoff,
                      double gamma = 0.0) {
  const int d1 = static_cast<int>(payoff.size());
  const int d2 = static_cast<int>(payoff[0].size());
  std::vector<double> rewards;
  for (const auto& row : payoff) rewards.insert(rewards.end(), row.begin(), row.end());
  return TabularSG(1, d1, d2, std::vector<double>(d1 * d2, 1.0), rewards,
                   gamma, {});
}

TabularSG RandomSG(int n, int d1, int d2, double gamma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> transition;
  std::vector<double> rewards;
  for (int k = 0; k < n * d1 * d2; ++k) {
    auto row = oracle::RandomSimplexPoint(n, rng);
    transition.insert(transition.end(), row.begin(), row.end());
    rewards.push_back(unif(rng));
  }
  // Normalize the rows exactly against rounding.
  for (int k = 0; k < n * d1 * d2; ++k) {
    double sum = 0.0;
    for (int t = 0; t < n; ++t) sum += transition[k * n + t];
    for (int t = 0; t < n; ++t) transition[k * n + t] /= sum;
  }
  return TabularSG(n, d1, d2, transition, rewards, gamma, {});
}

double Objective(const Density& pi, const Density& anchor,
                 const std::vector<double>& nu, double eta, double alpha) {
  return Inner(pi, nu) + alpha * Entropy(pi) - Kl(pi, anchor) / eta;
}

TEST_CASE("evaluation without discounting returns the rewards") {
  TabularSG sg = SingleState({{1.0, -0.5}, {0.25, 0.0}});
  Algorithm1Config config;
  EvaluationResult r = SoftPolicyEvaluation(sg, UniformStatePolicy(sg), config);
  CHECK(r.q(0, 0, 1) == -0.5);
  CHECK(r.q(0, 1, 0) == 0.25);
  CHECK(r.converged);
  // The second sweep confirms the first; no change.
  CHECK(r.deltas.back() == 0.0);
}

TEST_CASE("terminal successors contribute nothing") {
  // s0 -> s1 (terminal); Q(s0) = r(s0) and Q(s1) = r(s1).
  std::vector<double> transition = {0, 1, 0, 1};
  std::vector<double> rewards = {0.3, -0.1};
  TabularSG sg(2, 1, 1, transition, rewards, 0.9, {1});
  EvaluationResult r =
      SoftPolicyEvaluation(sg, UniformStatePolicy(sg), Algorithm1Config{});
  CHECK(r.q(0, 0, 0) == 0.3);
  CHECK(r.q(1, 0, 0) == -0.1);
}

TEST_CASE("evaluation of the soft-optimal policy matches soft value iteration") {
  const oracle::DenseMdp mdp = ChainMdp(0.9);
  const double alpha = 0.2;
  const oracle::SoftSolution sol = oracle::SoftValueIteration(mdp, alpha);
  TabularSG sg = ToSingleAgent(mdp);
  StatePolicy pi;
  for (int s = 0; s < 3; ++s) {
    pi.push_back({Density::FromValues(sg.support(Player::kOne), sol.policy[s]),
                  Density::Uniform(sg.support(Player::kTwo))});
  }
  Algorithm1Config config;
  config.alpha = alpha;
  EvaluationResult r = SoftPolicyEvaluation(sg, pi, config);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(r.q(s, a, 0) - sol.q[s][a]) <= 1e-6);
    }
  }
}

TEST_CASE("evaluation contracts at rate gamma") {
  std::mt19937_64 rng(41);
  for (double gamma : {0.5, 0.9}) {
    TabularSG sg = RandomSG(4, 2, 3, gamma, rng);
    Algorithm1Config config;
    config.eval_tol = 1e-13;
    EvaluationResult r = SoftPolicyEvaluation(sg, UniformStatePolicy(sg), config);
    REQUIRE(r.converged);
    // Each delta carries rounding of order eps * |Q|.
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         r.q.max_abs();
    for (std::size_t k = 2; k < r.deltas.size(); ++k) {
      CHECK(r.deltas[k] <= (gamma + 1e-9) * r.deltas[k - 1] + noise);
    }
  }
}

TEST_CASE("evaluation respects damping and the value bound") {
  std::mt19937_64 rng(42);
  TabularSG sg = RandomSG(3, 3, 2, 0.8, rng);
  Algorithm1Config config;
  config.alpha = 0.5;
  EvaluationResult undamped =
      SoftPolicyEvaluation(sg, UniformStatePolicy(sg), config);
  config.damping_tau = 0.3;
  EvaluationResult damped =
      SoftPolicyEvaluation(sg, UniformStatePolicy(sg), config);
  CHECK(damped.sweeps > undamped.sweeps);
  for (std::size_t i = 0; i < undamped.q.values().size(); ++i) {
    CHECK(std::abs(damped.q.values()[i] - undamped.q.values()[i]) <= 1e-10);
  }
  const double bound =
      (sg.r_max() + config.alpha * std::log(3.0)) / (1.0 - sg.gamma());
  CHECK(undamped.q.max_abs() <= bound);

  config.eval_sweeps = 3;
  config.eval_tol = 0.0;
  EvaluationResult capped =
      SoftPolicyEvaluation(sg, UniformStatePolicy(sg), config);
  CHECK(capped.sweeps == 3);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("per-state improvement on one state is the matrix-game step") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> payoff(3, std::vector<double>(4));
  for (auto& row : payoff) {
    for (double& x : row) x = unif(rng);
  }
  TabularSG sg = SingleState(payoff);
  Algorithm1Config config;
  EvaluationResult r = SoftPolicyEvaluation(sg, UniformStatePolicy(sg), config);
  StatePolicy next =
      PerStateImprove(sg, UniformStatePolicy(sg), r.q, 2.0, 0.3, 1);
  MatrixGame g = MatrixGame::ZeroSum(Matrix::FromRows(payoff));
  JointPolicy direct = MdStep(UniformJointPolicy(g), g, 2.0, 0.3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(next[0].player_1.value(i) - direct.player_1.value(i)) <=
          1e-12);
  }
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(next[0].player_2.value(j) - direct.player_2.value(j)) <=
          1e-12);
  }
}

TEST_CASE("per-state improvement increases the proximal objective") {
  TabularSG sg = ToSingleAgent(ChainMdp(0.9));
  Algorithm1Config config;
  config.alpha = 0.2;
  StatePolicy pi = UniformStatePolicy(sg);
  EvaluationResult r = SoftPolicyEvaluation(sg, pi, config);
  StatePolicy next = PerStateImprove(sg, pi, r.q, 1.0, 0.2, 1);
  for (int s = 0; s < 2; ++s) {
    const std::vector<double> nu{r.q(s, 0, 0), r.q(s, 1, 0)};
    CHECK(Objective(next[s].player_1, pi[s].player_1, nu, 1.0, 0.2) >
          Objective(pi[s].player_1, pi[s].player_1, nu, 1.0, 0.2));
  }
}

TEST_CASE("per-state qre of the converged q is unchanged by improvement") {
  const double alpha = 0.3;
  std::mt19937_64 rng(44);
  TabularSG sg = RandomSG(3, 2, 2, 0.7, rng);
  Algorithm1Config config;
  config.alpha = alpha;
  config.outer_iterations = 400;
  Algorithm1Result res = RunAlgorithm1(sg, config);
  StatePolicy next = PerStateImprove(sg, res.policy, res.q, 10.0, alpha, 1);
  for (int s = 0; s < 3; ++s) {
    CHECK(QreResidual(res.q.StageGame(s), res.policy[s], alpha) <= 1e-10);
    CHECK(JointKl(next[s], res.policy[s]) <= 1e-10);
  }
}

TEST_CASE("single-state runs converge to the qre") {
  const std::vector<std::vector<double>> payoff{{1.0, -0.4, 0.2},
                                                {-0.7, 0.5, 0.1}};
  TabularSG sg = SingleState(payoff);
  Algorithm1Config config;
  config.alpha = 0.2;
  // Simultaneous play needs a moderate step; eta = 10 cycles here.
  config.eta = 1.0;
  config.outer_iterations = 200;
  MatrixGame g = MatrixGame::ZeroSum(Matrix::FromRows(payoff));
  QreOptions options;
  options.tol = 1e-13;
  StatePolicy ref{QreSolve(g, 0.2, options).policy};
  Algorithm1Result res = RunAlgorithm1(sg, config, ref);
  CHECK(JointKl(ref[0], res.policy[0]) <= 1e-6);
  CHECK(res.trajectory.iterates.size() == 201);
  CHECK(res.trajectory.iterates.back().kl_to_reference <= 1e-6);
  CHECK(res.trajectory.warnings.empty());
}

TEST_CASE("bandit runs reach the soft-optimal policy") {
  const std::vector<double> r{0.3, 1.0, -0.2, 0.9};
  TabularSG sg = SingleState({{r[0]}, {r[1]}, {r[2]}, {r[3]}});
  Algorithm1Config config;
  config.alpha = 0.25;
  config.outer_iterations = 100;
  Algorithm1Result res = RunAlgorithm1(sg, config);
  Density target = SoftOptimal(sg.support(Player::kOne), r, 0.25);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(std::abs(res.policy[0].player_1.value(i) - target.value(i)) <= 1e-8);
  }
}

TEST_CASE("unregularized bandit runs concentrate monotonically") {
  TabularSG sg = SingleState({{0.2}, {0.8}, {0.5}});
  Algorithm1Config config;
  config.alpha = 0.0;
  config.eta = 1.0;
  StatePolicy pi = UniformStatePolicy(sg);
  double previous = pi[0].player_1.value(1);
  for (int round = 0; round < 30; ++round) {
    config.outer_iterations = 1;
    Algorithm1Result res = RunAlgorithm1(sg, config, {}, 0, pi);
    pi = res.policy;
    CHECK(pi[0].player_1.value(1) > previous);
    previous = pi[0].player_1.value(1);
  }
  CHECK(previous > 0.99);
}

TEST_CASE("discount-free single-state runs reproduce the dynamics") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> payoff(3, std::vector<double>(3));
  for (auto& row : payoff) {
    for (double& x : row) x = unif(rng);
  }
  TabularSG sg = SingleState(payoff);
  MatrixGame g = MatrixGame::ZeroSum(Matrix::FromRows(payoff));
  JointPolicy ref = QreSolve(g, 0.2).policy;

  Algorithm1Config a1;
  a1.eta = 0.5;
  a1.alpha = 0.2;
  a1.outer_iterations = 40;
  Algorithm1Result res = RunAlgorithm1(sg, a1, StatePolicy{ref});

  DynamicsConfig dyn;
  dyn.eta = 0.5;
  dyn.alpha = 0.2;
  dyn.iterations = 40;
  Trajectory tr = RunDynamics(g, dyn, ref);

  REQUIRE(tr.iterates.size() == res.trajectory.iterates.size());
  for (std::size_t k = 0; k < tr.iterates.size(); ++k) {
    CHECK(std::abs(tr.iterates[k].kl_to_reference -
                   res.trajectory.iterates[k].kl_to_reference) <= 1e-12);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(tr.final_policy->player_1.value(i) -
                   res.policy[0].player_1.value(i)) <= 1e-12);
    CHECK(std::abs(tr.final_policy->player_2.value(i) -
                   res.policy[0].player_2.value(i)) <= 1e-12);
  }
}

TEST_CASE("chain runs match the soft value iteration oracle") {
  const oracle::DenseMdp mdp = ChainMdp(0.9);
  const oracle::SoftSolution sol = oracle::SoftValueIteration(mdp, 0.2);
  TabularSG sg = ToSingleAgent(mdp);
  Algorithm1Config config;
  config.alpha = 0.2;
  config.eta = 10.0;
  config.outer_iterations = 300;
  StatePolicy ref;
  for (int s = 0; s < 3; ++s) {
    ref.push_back({Density::FromValues(sg.support(Player::kOne), sol.policy[s]),
                   Density::Uniform(sg.support(Player::kTwo))});
  }
  Algorithm1Result res = RunAlgorithm1(sg, config, ref);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(res.q(s, a, 0) - sol.q[s][a]) <= 1e-6);
    }
    CHECK(JointKl(ref[s], res.policy[s]) <= 1e-6);
  }
  CHECK(res.trajectory.final_policy.has_value());
}

TEST_CASE("regularized equilibrium reduces to soft value iteration") {
  const oracle::DenseMdp mdp = ChainMdp(0.9);
  const oracle::SoftSolution sol = oracle::SoftValueIteration(mdp, 0.2);
  TabularSG sg = ToSingleAgent(mdp);
  RegularizedEquilibrium eq = SolveRegularizedEquilibrium(sg, 0.2);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(eq.q(s, a, 0) - sol.q[s][a]) <= 1e-9);
      CHECK(std::abs(eq.policy[s].player_1.value(a) - sol.policy[s][a]) <=
            1e-9);
    }
  }
}

TEST_CASE("alternating evaluation and improvement reaches the regularized equilibrium") {
  std::mt19937_64 rng(47);
  TabularSG sg = RandomSG(3, 2, 2, 0.6, rng);
  RegularizedEquilibrium eq = SolveRegularizedEquilibrium(sg, 0.5);
  Algorithm1Config config;
  config.alpha = 0.5;
  config.eta = 1.0;
  config.outer_iterations = 300;
  Algorithm1Result res = RunAlgorithm1(sg, config, eq.policy);
  CHECK(res.trajectory.iterates.back().kl_to_reference <= 1e-8);
  for (int s = 0; s < 3; ++s) {
    CHECK(QreResidual(eq.q.StageGame(s), eq.policy[s], 0.5) <= 1e-12);
  }
  CHECK_THROWS_AS(SolveRegularizedEquilibrium(sg, 0.0), ConfigError);
}

TEST_CASE("configuration errors") {
  Algorithm1Config config;
  config.damping_tau = 0.0;
  CHECK_THROWS_AS(config.Validate(), ConfigError);
  config.damping_tau = 1.5;
  CHECK_THROWS_AS(config.Validate(), ConfigError);
  config = {};
  TabularSG sg = SingleState({{1.0}});
  CHECK_THROWS_AS(RunAlgorithm1(sg, config, {}, 3), ConfigError);
  StatePolicy wrong{{Density::Uniform(Support::Atoms(2)),
                     Density::Uniform(Support::Atoms(1))}};
  CHECK_THROWS_AS(SoftPolicyEvaluation(sg, wrong, config),
                  SupportMismatchError);
}

TEST_CASE("short evaluation budgets raise a warning") {
  std::mt19937_64 rng(46);
  TabularSG sg = RandomSG(3, 2, 2, 0.95, rng);
  Algorithm1Config config;
  config.eval_sweeps = 2;
  config.outer_iterations = 3;
  Algorithm1Result res = RunAlgorithm1(sg, config);
  CHECK(res.trajectory.warnings.size() == 1);
}

}  // namespace
}  // namespace porl
