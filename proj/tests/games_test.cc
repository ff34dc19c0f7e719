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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "porl/error.h"
#include "porl/json_io.h"

namespace porl {
namespace {

Density On(const SupportPtr& s, const std::vector<double>& p) {
  return Density::FromValues(s, p);
}

TEST_CASE("bilinear kernel discretizes at cell midpoints") {
  KernelGame kg = BuiltinKernelGame("bilinear");
  MatrixGame g = Discretize(kg, 2);
  CHECK(g.zero_sum());
  CHECK(g.payoff_1() ==
        Matrix::FromRows({{0.25, -0.25}, {-0.25, 0.25}}));
  CHECK(g.support(Player::kOne)->cell(0).center == std::vector<double>{-0.5});
  CHECK(g.support(Player::kTwo)->cell(1).measure == doctest::Approx(1.0));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(g.payoff_2()(i, j) == -g.payoff_1()(i, j));
    }
  }
}

TEST_CASE("constant kernel fills every entry") {
  KernelGame kg = BuiltinKernelGame("constant", {{"value", {0.7}}});
  MatrixGame g = Discretize(kg, 5);
  for (double x : g.payoff_1().data()) CHECK(x == 0.7);
}

TEST_CASE("quadrature of uniform play converges on a smooth kernel") {
  // Uniform-vs-uniform play of a1 * a2 on [-1, 1]^2 integrates to 0; use the
  // shifted kernel (a1 + 0.3)^2 * a2^2 whose integral over the product of
  // uniform densities is ((1/3 + 0.09) * (1/3)) by the midpoint oracle.
  KernelParams params{{"degree_1", {2}},
                      {"degree_2", {2}},
                      {"coefficients", {0, 0, 0.09, 0, 0, 0.6, 0, 0, 1.0}}};
  KernelGame kg = BuiltinKernelGame("polynomial", params);
  const double exact =
      oracle::Midpoint([](double x) { return (x + 0.3) * (x + 0.3) / 2.0; },
                       -1.0, 1.0, 200000) *
      oracle::Midpoint([](double y) { return y * y / 2.0; }, -1.0, 1.0,
                       200000);
  std::vector<double> errors;
  for (int res : {8, 16, 32, 64}) {
    MatrixGame g = Discretize(kg, res);
    JointPolicy u = UniformJointPolicy(g);
    errors.push_back(std::abs(ExpectedPayoff(g, Player::kOne, u.player_1,
                                             u.player_2) -
                              exact));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    // Second order: halving h cuts the error by about four.
    CHECK(errors[k] < errors[k - 1] / 3.5);
  }

  // The bilinear kernel is exact at every resolution.
  for (int res : {2, 3, 10}) {
    MatrixGame g = Discretize(BuiltinKernelGame("bilinear"), res);
    JointPolicy u = UniformJointPolicy(g);
    CHECK(std::abs(ExpectedPayoff(g, Player::kOne, u.player_1, u.player_2)) <=
          1e-15);
  }
}

TEST_CASE("discretization rejects coarse grids and non-finite kernels") {
  CHECK_THROWS_AS(Discretize(BuiltinKernelGame("bilinear"), 1), ConfigError);
  KernelGame bad{"log",
                 [](std::span<const double> a, std::span<const double>) {
                   return std::log(a[0]);
                 },
                 {{-1.0}, {1.0}},
                 {{-1.0}, {1.0}},
                 1.0};
  CHECK_THROWS_AS(Discretize(bad, 4), KernelDomainError);
}

TEST_CASE("unknown kernels and kernel parameters are config errors") {
  CHECK_THROWS_AS(BuiltinKernelGame("nope"), ConfigError);
  CHECK_THROWS_AS(BuiltinKernelGame("bilinear", {{"wobble", {1.0}}}),
                  ConfigError);
  CHECK(BuiltinKernelNames().size() >= 4);
}

TEST_CASE("multi-dimensional saddle kernel stays within its bound") {
  KernelGame kg = BuiltinKernelGame(
      "saddle", {{"dim", {2}}, {"coupling", {1.0}}, {"curvature", {0.5}}});
  MatrixGame g = Discretize(kg, 6);
  CHECK(g.num_actions(Player::kOne) == 36);
  CHECK(g.payoff_1().max_abs() <= kg.r_max);
}

TEST_CASE("marginal q examples") {
  MatrixGame mp = MatchingPennies();
  JointPolicy u = UniformJointPolicy(mp);
  for (double x : MarginalQ(mp, Player::kOne, u.player_2)) CHECK(x == 0.0);
  for (double x : MarginalQ(mp, Player::kTwo, u.player_1)) CHECK(x == 0.0);

  // All mass on one cell reproduces a payoff column.
  MatrixGame g = MatrixGame::ZeroSum(Matrix::FromRows({{2, 0}, {0, 1}}));
  ValueVector col = MarginalQ(g, Player::kOne, On(g.support(Player::kTwo),
                                                  {1.0 - 1e-300, 1e-300}));
  CHECK(col[0] == doctest::Approx(2.0));
  CHECK(col[1] == doctest::Approx(0.0));

  ValueVector nu =
      MarginalQ(g, Player::kOne, On(g.support(Player::kTwo), {0.5, 0.5}));
  CHECK(nu[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nu[1] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(MarginalQ(g, Player::kOne,
                            Density::Uniform(Support::Atoms(3))),
                  SupportMismatchError);
}

TEST_CASE("marginal q properties on random games") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d1 = 2 + trial % 4;
    const std::size_t d2 = 2 + (trial / 4) % 5;
    Matrix m(d1, d2);
    for (std::size_t i = 0; i < d1; ++i) {
      for (std::size_t j = 0; j < d2; ++j) m(i, j) = unif(rng);
    }
    MatrixGame g = MatrixGame::ZeroSum(m);
    auto s1 = g.support(Player::kOne);
    auto s2 = g.support(Player::kTwo);
    Density p = On(s2, oracle::RandomSimplexPoint(d2, rng));
    Density q = On(s2, oracle::RandomSimplexPoint(d2, rng));
    const double lambda = 0.3;
    Density mix = Mix(p, q, 1.0 - lambda);
    ValueVector a = MarginalQ(g, Player::kOne, p);
    ValueVector b = MarginalQ(g, Player::kOne, q);
    ValueVector c = MarginalQ(g, Player::kOne, mix);
    for (std::size_t i = 0; i < d1; ++i) {
      CHECK(std::abs(c[i] - (lambda * a[i] + (1 - lambda) * b[i])) <= 1e-12);
      CHECK(std::abs(a[i]) <= g.r_max());
    }

    Density pi_1 = On(s1, oracle::RandomSimplexPoint(d1, rng));
    Density pi_2 = p;
    const double v1 = Inner(pi_1, MarginalQ(g, Player::kOne, pi_2));
    const double v2 = Inner(pi_2, MarginalQ(g, Player::kTwo, pi_1));
    CHECK(std::abs(v1 + v2) <= 1e-10);
  }
}

TEST_CASE("matrix games validate payoffs") {
  CHECK_THROWS_AS(MatrixGame::ZeroSum(Matrix::FromRows({{2.0}}), 1.0),
                  ModelError);
  CHECK_THROWS_AS(
      MatrixGame::GeneralSum(Matrix::FromRows({{1, 2}}),
                             Matrix::FromRows({{1}, {2}})),
      ModelError);
  CHECK_THROWS_AS(MatrixGame::ZeroSum(Matrix::FromRows({{NAN}})), ModelError);
  MatrixGame shifted = MatchingPennies().Shifted(0.5);
  CHECK_FALSE(shifted.zero_sum());
  CHECK(shifted.payoff_2()(0, 0) == -0.5);
}

TEST_CASE("single-agent games have a trivial opponent") {
  const std::vector<double> values{1.0, 0.0, -0.5};
  MatrixGame g = MatrixGame::SingleAgent(values);
  CHECK(g.num_actions(Player::kTwo) == 1);
  JointPolicy u = UniformJointPolicy(g);
  CHECK(u.player_2.value(0) == 1.0);
  ValueVector nu = MarginalQ(g, Player::kOne, u.player_2);
  CHECK(nu == values);
}

TEST_CASE("matrix game json round trip") {
  Json j = Json::parse(R"({"payoff_1": [[1, -1], [-1, 1]]})");
  MatrixGame g = MatrixGameFromJson(j);
  CHECK(g.zero_sum());
  CHECK(g.payoff_1() == MatchingPennies().payoff_1());
  MatrixGame back = MatrixGameFromJson(MatrixGameToJson(g));
  CHECK(back.payoff_2() == g.payoff_2());

  Json inconsistent = Json::parse(
      R"({"payoff_1": [[1]], "payoff_2": [[1]], "zero_sum": true})");
  CHECK_THROWS_AS(MatrixGameFromJson(inconsistent), ModelError);
  CHECK_THROWS_AS(MatrixGameFromJson(Json::parse(R"({"payoff": 1})")),
                  ConfigError);
}

TabularSG TwoStateChain(double gamma) {
  // s0 -> s1 (terminal) under any joint action.
  std::vector<double> transition = {0, 1, 0, 1, 0, 1, 0, 1,
                                    0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<double> rewards = {1, -1, -1, 1, 0, 0, 0, 0};
  return TabularSG(2, 2, 2, transition, rewards, gamma, {1});
}

TEST_CASE("tabular stochastic games validate their tables") {
  TabularSG sg = TwoStateChain(0.9);
  CHECK(sg.value_bound() == doctest::Approx(10.0));
  CHECK(sg.is_terminal(1));
  CHECK(sg.transition(0, 1, 0)[1] == 1.0);
  CHECK(sg.reward(0, 1, 1) == 1.0);

  std::vector<double> bad_row(16, 0.5);
  bad_row[0] = 0.5 + 1e-9;
  CHECK_THROWS_AS(TabularSG(2, 2, 2, bad_row, std::vector<double>(8, 0.0),
                            0.9, {}),
                  ModelError);
  CHECK_THROWS_AS(TwoStateChain(1.0), ModelError);
  CHECK_THROWS_AS(TwoStateChain(-0.1), ModelError);

  TabularSG back = TabularSGFromJson(TabularSGToJson(sg));
  CHECK(std::vector<double>(back.transition_data().begin(),
                            back.transition_data().end()) ==
        std::vector<double>(sg.transition_data().begin(),
                            sg.transition_data().end()));
  CHECK(back.terminal_states() == std::vector<int>{1});
}

}  // namespace
}  // namespace porl
