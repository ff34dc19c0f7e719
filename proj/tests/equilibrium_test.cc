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

#include "porl/equilibrium.h"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "porl/error.h"

namespace porl {
namespace {

MatrixGame RandomZeroSum(std::size_t d1, std::size_t d2, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix m(d1, d2);
  for (std::size_t i = 0; i < d1; ++i) {
    for (std::size_t j = 0; j < d2; ++j) m(i, j) = unif(rng);
  }
  return MatrixGame::ZeroSum(m);
}

JointPolicy PureHeads(const MatrixGame& g) {
  return {Density::FromValues(g.support(Player::kOne),
                              std::vector<double>{1.0 - 1e-300, 1e-300}),
          Density::FromValues(g.support(Player::kTwo),
                              std::vector<double>{1.0 - 1e-300, 1e-300})};
}

TEST_CASE("soft optimal examples") {
  auto s = Support::Atoms(4);
  Density flat = SoftOptimal(s, std::vector<double>(4, 3.0), 0.7);
  for (double v : flat.values()) CHECK(v == doctest::Approx(0.25));

  Density p = SoftOptimal(Support::Atoms(2), std::vector<double>{1.0, 0.0}, 0.5);
  // softmax(2, 0)
  CHECK(p.value(0) == doctest::Approx(0.8807970779778824).epsilon(1e-14));
  CHECK(p.value(1) == doctest::Approx(0.11920292202211757).epsilon(1e-14));

  CHECK_THROWS_AS(SoftOptimal(s, std::vector<double>(4, 0.0), 0.0),
                  ConfigError);
  CHECK_THROWS_AS(SoftOptimal(s, std::vector<double>(4, 0.0), -1.0),
                  ConfigError);
}

TEST_CASE("soft optimal matches the projected-gradient oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const double alpha = 0.3 + 0.1 * (trial % 4);
    std::vector<double> u(n);
    for (double& x : u) x = unif(rng);
    const std::vector<double> g = oracle::ProjectedGradientSoftMax(u, alpha);
    Density d = SoftOptimal(Support::Atoms(n), u, alpha);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(d.value(i) - g[i]) <= 1e-6);
    }
  }
}

TEST_CASE("soft optimal is argmax-consistent") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(7);
    for (double& x : v) x = normal(rng);
    Density d = SoftOptimal(Support::Atoms(7), v, 0.05 + 0.2 * (trial % 5));
    std::size_t best_value = 0;
    std::size_t best_density = 0;
    for (std::size_t i = 1; i < 7; ++i) {
      if (v[i] > v[best_value]) best_value = i;
      if (d.value(i) > d.value(best_density)) best_density = i;
    }
    CHECK(best_value == best_density);
  }
}

TEST_CASE("qre examples") {
  for (double alpha : {0.05, 0.2, 1.0, 5.0}) {
    QreSolution rps = QreSolve(RockPaperScissors(), alpha);
    CHECK(rps.residual <= 1e-10);
    for (double v : rps.policy.player_1.values()) {
      CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }
  }
  const std::vector<double> q{1.0, 0.0};
  QreSolution single = QreSolve(MatrixGame::SingleAgent(q), 0.5);
  CHECK(single.policy.player_1.value(0) ==
        doctest::Approx(0.8807970779778824).epsilon(1e-9));
  CHECK(single.alpha == 0.5);

  QreSolution mp = QreSolve(MatchingPennies(), 0.2);
  CHECK(mp.policy.player_1.value(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mp.policy.player_2.value(1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("qre reports non-convergence with the last residual") {
  std::mt19937_64 rng(8);
  MatrixGame g = RandomZeroSum(4, 4, rng);
  QreOptions options;
  options.max_iters = 2;
  options.tol = 1e-15;
  try {
    QreSolve(g, 0.1, options);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_residual() > 0.0);
  }
}

TEST_CASE("qre is invariant to the damping weight") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixGame g = RandomZeroSum(3 + trial % 3, 3, rng);
    const double alpha = 0.5;
    std::vector<JointPolicy> solutions;
    for (double damping : {0.1, 0.5, 1.0}) {
      QreOptions options;
      options.damping = damping;
      solutions.push_back(QreSolve(g, alpha, options).policy);
    }
    for (const JointPolicy& s : solutions) {
      for (std::size_t i = 0; i < s.player_1.size(); ++i) {
        CHECK(std::abs(s.player_1.value(i) - solutions[0].player_1.value(i)) <=
              1e-9);
      }
      for (std::size_t j = 0; j < s.player_2.size(); ++j) {
        CHECK(std::abs(s.player_2.value(j) - solutions[0].player_2.value(j)) <=
              1e-9);
      }
    }
  }
}

TEST_CASE("qre exploitability stays under the entropy gap") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + trial % 4;
    MatrixGame g = RandomZeroSum(d, d, rng);
    for (double alpha : {0.1, 0.5}) {
      QreSolution sol = QreSolve(g, alpha);
      CHECK(Exploitability(g, sol.policy) <=
            2.0 * alpha * std::log(static_cast<double>(d)) + 1e-9);
    }
  }
}

TEST_CASE("qre concentrates on a unique pure equilibrium as alpha shrinks") {
  // Row 0 strictly dominates; column 1 is then the unique best reply.
  MatrixGame g = MatrixGame::ZeroSum(Matrix::FromRows({{1.0, 0.5}, {0.0, -1.0}}));
  double previous = 0.0;
  for (double alpha : {1.0, 0.1, 0.01}) {
    QreSolution sol = QreSolve(g, alpha);
    const double mass = sol.policy.player_1.value(0) * sol.policy.player_2.value(1);
    CHECK(mass > previous);
    previous = mass;
  }
  CHECK(previous > 0.99);
}

TEST_CASE("exploitability examples") {
  MatrixGame mp = MatchingPennies();
  CHECK(Exploitability(mp, UniformJointPolicy(mp)) == doctest::Approx(0.0));
  CHECK(Exploitability(mp, PureHeads(mp)) == doctest::Approx(2.0));
  ExploitabilityGains gains = PerPlayerExploitability(mp, PureHeads(mp));
  CHECK(gains.player_1 == doctest::Approx(0.0));
  CHECK(gains.player_2 == doctest::Approx(2.0));
  CHECK(BestResponse(mp, Player::kOne, UniformJointPolicy(mp).player_2) == 0);
  CHECK_THROWS_AS(
      Exploitability(mp, {Density::Uniform(Support::Atoms(3)),
                          Density::Uniform(Support::Atoms(2))}),
      SupportMismatchError);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    MatrixGame g = RandomZeroSum(3, 4, rng);
    JointPolicy pi{Density::FromValues(g.support(Player::kOne),
                                       oracle::RandomSimplexPoint(3, rng)),
                   Density::FromValues(g.support(Player::kTwo),
                                       oracle::RandomSimplexPoint(4, rng))};
    CHECK(Exploitability(g, pi) >= 0.0);
  }
}

TEST_CASE("cross-play examples") {
  MatrixGame mp = MatchingPennies();
  JointPolicy uniform = UniformJointPolicy(mp);
  JointPolicy heads = PureHeads(mp);
  CrossPlayTable t = CrossPlay(mp, uniform, heads);
  CHECK(t[0][1] == doctest::Approx(0.0));
  CHECK(t[0][0] == doctest::Approx(0.0));
  CHECK(CrossPlayScore(mp, heads, heads) == CrossPlayScore(mp, heads, heads));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    MatrixGame g = RandomZeroSum(3, 3, rng);
    auto draw = [&] {
      return JointPolicy{
          Density::FromValues(g.support(Player::kOne),
                              oracle::RandomSimplexPoint(3, rng)),
          Density::FromValues(g.support(Player::kTwo),
                              oracle::RandomSimplexPoint(3, rng))};
    };
    JointPolicy a = draw();
    JointPolicy b = draw();
    CrossPlayTable s = CrossPlay(g, a, b);
    CHECK(std::abs(s[0][1] + s[1][0]) <= 1e-10);
    CHECK(std::abs(s[0][0]) <= 1e-10);
    CHECK(s[0][1] == doctest::Approx(CrossPlayScore(g, a, b)));
  }
}

}  // namespace
}  // namespace porl
