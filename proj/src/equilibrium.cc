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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "porl/error.h"

namespace porl {

Density SoftOptimal(SupportPtr support, std::span<const double> values,
                    double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("SoftOptimal: alpha must be positive");
  }
  std::vector<double> logits(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValueError("SoftOptimal: non-finite value");
    }
    logits[i] = values[i] / alpha;
  }
  return Density::FromLogits(std::move(support), std::move(logits));
}

JointPolicy LogitResponse(const MatrixGame& game, const JointPolicy& pi,
                          double alpha) {
  return {SoftOptimal(game.support(Player::kOne),
                      MarginalQ(game, Player::kOne, pi.player_2), alpha),
          SoftOptimal(game.support(Player::kTwo),
                      MarginalQ(game, Player::kTwo, pi.player_1), alpha)};
}

namespace {

double SupDistance(const Density& a, const Density& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a.value(i) - b.value(i)));
  }
  return d;
}

double Residual(const JointPolicy& pi, const JointPolicy& response) {
  return std::max(SupDistance(pi.player_1, response.player_1),
                  SupDistance(pi.player_2, response.player_2));
}

}  // namespace

double QreResidual(const MatrixGame& game, const JointPolicy& pi,
                   double alpha) {
  return Residual(pi, LogitResponse(game, pi, alpha));
}

namespace {

constexpr long kDampingWindow = 200;
constexpr double kMinDamping = 1e-4;

}  // namespace

QreSolution QreSolve(const MatrixGame& game, double alpha,
                     const QreOptions& options) {
  if (!(alpha > 0.0)) throw ConfigError("QreSolve: alpha must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw ConfigError("QreSolve: damping must lie in (0, 1]");
  }
  if (!(options.tol > 0.0) || options.max_iters < 0) {
    throw ConfigError("QreSolve: tol must be positive, max_iters >= 0");
  }
  JointPolicy pi = options.initial.value_or(UniformJointPolicy(game));
  RequireSameSupport(pi.player_1.support(), game.support(Player::kOne),
                     "QreSolve");
  RequireSameSupport(pi.player_2.support(), game.support(Player::kTwo),
                     "QreSolve");

  double residual = 0.0;
  double damping = options.damping;
  double window_start = std::numeric_limits<double>::infinity();
  for (long iter = 0;; ++iter) {
    JointPolicy response = LogitResponse(game, pi, alpha);
    residual = Residual(pi, response);
    if (residual <= options.tol) {
      return {std::move(pi), residual, alpha, iter};
    }
    if (iter >= options.max_iters) break;
    if (options.adaptive_damping && iter % kDampingWindow == 0) {
      // No progress over a window means the damped map is oscillating.
      if (residual >= window_start) {
        damping = std::max(0.5 * damping, kMinDamping);
      }
      window_start = residual;
    }
    pi = {Mix(pi.player_1, response.player_1, damping),
          Mix(pi.player_2, response.player_2, damping)};
  }
  std::ostringstream msg;
  msg << "QreSolve: no convergence after " << options.max_iters
      << " iterations (residual " << residual << ", alpha " << alpha << ")";
  throw ConvergenceError(msg.str(), residual);
}

std::size_t BestResponse(const MatrixGame& game, Player player,
                         const Density& opponent) {
  const ValueVector nu = MarginalQ(game, player, opponent);
  // max_element returns the first maximum.
  return static_cast<std::size_t>(
      std::max_element(nu.begin(), nu.end()) - nu.begin());
}

ExploitabilityGains PerPlayerExploitability(const MatrixGame& game,
                                            const JointPolicy& pi) {
  auto gain = [&](Player p) {
    const Density& own = pi.of(p);
    RequireSameSupport(own.support(), game.support(p), "Exploitability");
    const ValueVector nu = MarginalQ(game, p, pi.of(Opponent(p)));
    const double best = *std::max_element(nu.begin(), nu.end());
    return std::max(best - Inner(own, nu), 0.0);
  };
  return {gain(Player::kOne), gain(Player::kTwo)};
}

double Exploitability(const MatrixGame& game, const JointPolicy& pi) {
  return PerPlayerExploitability(game, pi).total();
}

double CrossPlayScore(const MatrixGame& game, const JointPolicy& row,
                      const JointPolicy& col) {
  return ExpectedPayoff(game, Player::kOne, row.player_1, col.player_2) +
         ExpectedPayoff(game, Player::kTwo, col.player_1, row.player_2);
}

CrossPlayTable CrossPlay(const MatrixGame& game, const JointPolicy& a,
                         const JointPolicy& b) {
  return {{{CrossPlayScore(game, a, a), CrossPlayScore(game, a, b)},
           {CrossPlayScore(game, b, a), CrossPlayScore(game, b, b)}}};
}

}  // namespace porl
