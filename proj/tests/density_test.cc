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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "porl/error.h"
#include "porl/json_io.h"

namespace porl {
namespace {

Density Atoms(std::vector<double> p) {
  return Density::FromValues(Support::Atoms(p.size()), p);
}

SupportPtr UnitInterval(int cells) {
  const std::vector<double> lo{-1.0};
  const std::vector<double> hi{1.0};
  const std::vector<int> res{cells};
  return Support::Grid(lo, hi, res);
}

TEST_CASE("grid supports use midpoint cells of equal measure") {
  const std::vector<double> lo{-1.0, 0.0};
  const std::vector<double> hi{1.0, 3.0};
  const std::vector<int> res{2, 3};
  auto s = Support::Grid(lo, hi, res);
  REQUIRE(s->size() == 6);
  CHECK(s->total_volume() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(s->cell(0).center == std::vector<double>{-0.5, 0.5});
  CHECK(s->cell(1).center == std::vector<double>{-0.5, 1.5});
  CHECK(s->cell(5).center == std::vector<double>{0.5, 2.5});
  for (const Cell& c : s->cells()) CHECK(c.measure == doctest::Approx(1.0));
}

TEST_CASE("supports reject non-positive measures") {
  CHECK_THROWS_AS(Support::FromCells({{{0.0}, 0.0}}), ValueError);
  CHECK_THROWS_AS(Support::FromCells({{{0.0}, -1.0}}), ValueError);
}

TEST_CASE("densities are normalized against the cell measures") {
  auto s = UnitInterval(8);
  std::vector<double> logits{0.3, -1.0, 2.0, 5.0, -4.0, 0.0, 1.0, 7.0};
  Density d = Density::FromLogits(s, logits);
  double mass = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) mass += d.mass(i);
  CHECK(std::abs(mass - 1.0) <= kNormalizationTolerance);

  // Large logits do not overflow.
  Density big = Density::FromLogits(s, std::vector<double>(8, 800.0));
  CHECK(big.value(0) == doctest::Approx(0.5));
}

TEST_CASE("zero or non-finite mass is rejected") {
  auto s = Support::Atoms(2);
  const std::vector<double> with_zero{1.0, 0.0};
  CHECK_THROWS_AS(Density::FromValues(s, with_zero), ValueError);
  CHECK_THROWS_AS(Density::FromLogits(s, {0.0, INFINITY}), ValueError);
  CHECK_THROWS_AS(Density::FromNormalizedLogValues(s, {0.0, 0.0}), ValueError);
}

TEST_CASE("upper bound is enforced") {
  auto s = Support::Atoms(2);
  const std::vector<double> p{0.9, 0.1};
  CHECK_THROWS_AS(Density::FromValues(s, p, 0.5), ValueError);
  CHECK_NOTHROW(Density::FromValues(s, p, 0.95));
}

TEST_CASE("entropy examples") {
  CHECK(Entropy(Atoms({0.5, 0.5})) == doctest::Approx(std::log(2.0)));
  for (int cells : {2, 7, 64}) {
    CHECK(Entropy(Density::Uniform(UnitInterval(cells))) ==
          doctest::Approx(0.693147).epsilon(1e-6));
  }
  // -(0.999 ln 0.999 + 0.001 ln 0.001)
  CHECK(Entropy(Atoms({0.999, 0.001})) ==
        doctest::Approx(0.007907255112232087).epsilon(1e-12));
}

TEST_CASE("entropy of uniform equals log volume") {
  const std::vector<double> lo{0.0, -2.0};
  const std::vector<double> hi{3.0, 2.0};
  const std::vector<int> res{5, 4};
  auto s = Support::Grid(lo, hi, res);
  CHECK(Entropy(Density::Uniform(s)) == doctest::Approx(std::log(12.0)));
}

TEST_CASE("kl examples") {
  Density p = Atoms({0.8, 0.2});
  Density q = Atoms({0.5, 0.5});
  CHECK(Kl(p, p) == 0.0);
  CHECK(Kl(p, q) == doctest::Approx(0.19274475702175753).epsilon(1e-12));
  CHECK_THROWS_AS(Kl(Density::Uniform(UnitInterval(4)),
                     Density::Uniform(UnitInterval(8))),
                  SupportMismatchError);
}

TEST_CASE("structurally equal supports are interchangeable") {
  Density a = Density::Uniform(UnitInterval(4));
  Density b = Density::Uniform(UnitInterval(4));
  CHECK(Kl(a, b) == 0.0);
}

TEST_CASE("l2 distance examples") {
  Density p = Atoms({0.9, 0.1});
  Density q = Atoms({0.1, 0.9});
  CHECK(L2Distance(p, p) == 0.0);
  CHECK(L2Distance(p, q) == doctest::Approx(1.131370849898476).epsilon(1e-12));
  CHECK_THROWS_AS(L2Distance(p, Density::Uniform(UnitInterval(2))),
                  SupportMismatchError);
}

TEST_CASE("l2 distance follows the measure-weighted integral") {
  // Same pair on cells of measure 2: density values halve, so
  // ||p - q||^2 = sum (dp/2)^2 * 2 = half the unit-measure value.
  auto wide = Support::FromCells({{{0.0}, 2.0}, {{1.0}, 2.0}});
  Density p = Density::FromValues(wide, std::vector<double>{0.9, 0.1});
  Density q = Density::FromValues(wide, std::vector<double>{0.1, 0.9});
  CHECK(p.value(0) == doctest::Approx(0.45));
  CHECK(L2Distance(p, q) ==
        doctest::Approx(1.131370849898476 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("kl three-point identity") {
  Density u = Atoms({0.5, 0.5});
  ThreePoint same = KlThreePoint(u, u, u);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);

  ThreePoint tp = KlThreePoint(Atoms({0.7, 0.3}), Atoms({0.4, 0.6}), u);
  CHECK(tp.lhs == doctest::Approx(0.25418935811616106).epsilon(1e-12));
  CHECK(std::abs(tp.lhs - tp.rhs) <= 1e-12);
}

TEST_CASE("kl three-point identity holds on random triples") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_int_distribution<int> cells(2, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    auto s = UnitInterval(cells(rng));
    auto draw = [&] {
      std::vector<double> logits(s->size());
      for (double& l : logits) l = normal(rng);
      return Density::FromLogits(s, logits);
    };
    ThreePoint tp = KlThreePoint(draw(), draw(), draw());
    REQUIRE(std::abs(tp.lhs - tp.rhs) <= 1e-9);
  }
}

TEST_CASE("kl is non-negative and vanishes only at equality") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto s = UnitInterval(16);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(16);
    std::vector<double> b(16);
    for (double& x : a) x = normal(rng);
    for (double& x : b) x = normal(rng);
    Density p = Density::FromLogits(s, a);
    Density q = Density::FromLogits(s, b);
    CHECK(Kl(p, q) > 0.0);
    CHECK(Kl(p, p) <= 1e-12);
  }
}

TEST_CASE("kl dominates the scaled squared l2 distance for bounded pairs") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.5);
  std::uniform_int_distribution<int> cells(2, 50);
  for (int trial = 0; trial < 1000; ++trial) {
    auto s = UnitInterval(cells(rng));
    std::vector<double> a(s->size());
    std::vector<double> b(s->size());
    for (double& x : a) x = normal(rng);
    for (double& x : b) x = normal(rng);
    Density p = Density::FromLogits(s, a);
    Density q = Density::FromLogits(s, b);
    const double bound = std::max(p.max_value(), q.max_value());
    const double l2 = L2Distance(p, q);
    REQUIRE(Kl(p, q) >= l2 * l2 / (2.0 * bound));
  }
}

TEST_CASE("mix stays normalized") {
  Density m = Mix(Atoms({0.9, 0.1}), Atoms({0.2, 0.8}), 0.25);
  CHECK(m.value(0) == doctest::Approx(0.725));
  CHECK(m.value(1) == doctest::Approx(0.275));
  CHECK_THROWS_AS(Mix(Atoms({0.5, 0.5}), Atoms({0.5, 0.5}), 1.5), ValueError);
}

TEST_CASE("density json round trip") {
  const std::vector<double> lo{-1.0, -1.0};
  const std::vector<double> hi{1.0, 1.0};
  const std::vector<int> res{3, 4};
  auto s = Support::Grid(lo, hi, res);
  std::vector<double> logits(s->size());
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = 0.1 * i;
  Density d = Density::FromLogits(s, logits);
  const Json j = DensityToJson(d);
  CHECK(j.contains("cells"));
  CHECK(j.contains("log_values"));
  Density back = DensityFromJson(Json::parse(j.dump()));
  CHECK(SameSupport(back.support(), d.support()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.log_value(i) == d.log_value(i));
  }
  Json bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(DensityFromJson(bad), ConfigError);
}

}  // namespace
}  // namespace porl
