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

#include "porl/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "porl/equilibrium.h"
#include "porl/error.h"

namespace porl {

std::string_view ToString(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::kMirrorDescent:
      return "md";
    case UpdateRule::kFtrl:
      return "ftrl";
    case UpdateRule::kFtrlCumulative:
      return "ftrl_cumulative";
    case UpdateRule::kMwu:
      return "mwu";
  }
  return "unknown";
}

UpdateRule ParseUpdateRule(std::string_view name) {
  if (name == "md") return UpdateRule::kMirrorDescent;
  if (name == "ftrl") return UpdateRule::kFtrl;
  if (name == "ftrl_cumulative") return UpdateRule::kFtrlCumulative;
  if (name == "mwu") return UpdateRule::kMwu;
  throw ConfigError("unknown update rule '" + std::string(name) + "'");
}

void DynamicsConfig::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("dynamics: eta must be positive and finite");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("dynamics: alpha must be non-negative");
  }
  if (iterations < 0) throw ConfigError("dynamics: iterations must be >= 0");
  if (record_every < 1) throw ConfigError("dynamics: record_every must be >= 1");
  if (decay_interval < 1) {
    throw ConfigError("dynamics: decay_interval must be >= 1");
  }
  if (!(alpha_decay > 0.0 && alpha_decay <= 1.0)) {
    throw ConfigError("dynamics: alpha_decay must lie in (0, 1]");
  }
  if (!(alpha_floor_fraction > 0.0 && alpha_floor_fraction <= 1.0)) {
    throw ConfigError("dynamics: alpha_floor_fraction must lie in (0, 1]");
  }
  if (rule == UpdateRule::kMwu && alpha != 0.0) {
    throw ConfigError("dynamics: the mwu rule requires alpha = 0");
  }
  if (rule == UpdateRule::kFtrl && eta * alpha >= 1.0) {
    throw ConfigError("dynamics: the ftrl rule requires eta * alpha < 1");
  }
  if (rule == UpdateRule::kFtrlCumulative && alpha != 0.0) {
    throw UnsupportedConfigError(
        "dynamics: the cumulative ftrl rule is only defined for alpha = 0");
  }
}

namespace {

void CheckStepArgs(double eta, double alpha, const char* who) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError(std::string(who) + ": eta must be positive and finite");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError(std::string(who) + ": alpha must be non-negative");
  }
}

void CheckFinite(const ValueVector& nu) {
  for (double v : nu) {
    if (!std::isfinite(v)) throw ValueError("non-finite marginal payoff");
  }
}

// logits[i] = log_weight * log pi[i] + value_weight * nu[i].
Density Update(const Density& pi, const ValueVector& nu, double log_weight,
               double value_weight) {
  std::vector<double> logits(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    logits[i] = log_weight * pi.log_value(i) + value_weight * nu[i];
  }
  return Density::FromLogits(pi.support(), std::move(logits));
}

}  // namespace

JointValues JointMarginals(const MatrixGame& game, const JointPolicy& pi) {
  JointValues nu{MarginalQ(game, Player::kOne, pi.player_2),
                 MarginalQ(game, Player::kTwo, pi.player_1)};
  CheckFinite(nu.player_1);
  CheckFinite(nu.player_2);
  return nu;
}

JointPolicy MdStep(const JointPolicy& pi, const MatrixGame& game, double eta,
                   double alpha) {
  CheckStepArgs(eta, alpha, "MdStep");
  const JointValues nu = JointMarginals(game, pi);
  const double denom = eta * alpha + 1.0;
  auto step = [&](const Density& p, const ValueVector& v) {
    std::vector<double> logits(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      logits[i] = (eta * v[i] + p.log_value(i)) / denom;
    }
    return Density::FromLogits(p.support(), std::move(logits));
  };
  return {step(pi.player_1, nu.player_1), step(pi.player_2, nu.player_2)};
}

JointPolicy FtrlStep(const JointPolicy& pi, const MatrixGame& game, double eta,
                     double alpha) {
  CheckStepArgs(eta, alpha, "FtrlStep");
  if (eta * alpha >= 1.0) {
    throw ConfigError("FtrlStep: eta * alpha must be < 1");
  }
  const JointValues nu = JointMarginals(game, pi);
  const double keep = 1.0 - eta * alpha;
  return {Update(pi.player_1, nu.player_1, keep, eta),
          Update(pi.player_2, nu.player_2, keep, eta)};
}

JointPolicy MwuStep(const JointPolicy& pi, const MatrixGame& game, double eta) {
  CheckStepArgs(eta, 0.0, "MwuStep");
  const JointValues nu = JointMarginals(game, pi);
  return {Update(pi.player_1, nu.player_1, 1.0, eta),
          Update(pi.player_2, nu.player_2, 1.0, eta)};
}

JointPolicy FtrlCumulativeStep(std::span<const JointValues> history,
                               const JointPolicy& pi, double eta,
                               double alpha) {
  CheckStepArgs(eta, alpha, "FtrlCumulativeStep");
  if (alpha != 0.0) {
    throw UnsupportedConfigError(
        "FtrlCumulativeStep: only alpha = 0 is supported");
  }
  std::vector<double> sum_1(pi.player_1.size(), 0.0);
  std::vector<double> sum_2(pi.player_2.size(), 0.0);
  for (const JointValues& nu : history) {
    if (nu.player_1.size() != sum_1.size() ||
        nu.player_2.size() != sum_2.size()) {
      throw SupportMismatchError("FtrlCumulativeStep: history size mismatch");
    }
    CheckFinite(nu.player_1);
    CheckFinite(nu.player_2);
    for (std::size_t i = 0; i < sum_1.size(); ++i) sum_1[i] += nu.player_1[i];
    for (std::size_t i = 0; i < sum_2.size(); ++i) sum_2[i] += nu.player_2[i];
  }
  for (double& v : sum_1) v *= eta;
  for (double& v : sum_2) v *= eta;
  return {Density::FromLogits(pi.player_1.support(), std::move(sum_1)),
          Density::FromLogits(pi.player_2.support(), std::move(sum_2))};
}

double ContractionStepSizeBound(double b, double alpha, double value_bound) {
  const double b2 = b * b;
  const double l4 = std::pow(value_bound, 4);
  if (l4 == 0.0) return 1.0 / b2;
  return std::min(1.0 / b2, alpha * alpha / (b2 * l4));
}

double JointKl(const JointPolicy& p, const JointPolicy& q) {
  return Kl(p.player_1, q.player_1) + Kl(p.player_2, q.player_2);
}

TrajectoryPoint Measure(const MatrixGame& game, const JointPolicy& pi,
                        const std::optional<JointPolicy>& reference, long t) {
  TrajectoryPoint p;
  p.t = t;
  p.kl_to_reference = reference ? JointKl(*reference, pi)
                                : std::numeric_limits<double>::quiet_NaN();
  p.exploitability = Exploitability(game, pi);
  p.entropy_1 = Entropy(pi.player_1);
  p.entropy_2 = Entropy(pi.player_2);
  p.value = ExpectedPayoff(game, Player::kOne, pi.player_1, pi.player_2);
  return p;
}

Trajectory RunDynamics(const MatrixGame& game, const DynamicsConfig& config,
                       const std::optional<JointPolicy>& reference,
                       const std::optional<JointPolicy>& initial) {
  config.Validate();
  JointPolicy pi = initial.value_or(UniformJointPolicy(game));
  RequireSameSupport(pi.player_1.support(), game.support(Player::kOne),
                     "RunDynamics");
  RequireSameSupport(pi.player_2.support(), game.support(Player::kTwo),
                     "RunDynamics");
  if (reference) {
    RequireSameSupport(reference->player_1.support(),
                       game.support(Player::kOne), "RunDynamics reference");
    RequireSameSupport(reference->player_2.support(),
                       game.support(Player::kTwo), "RunDynamics reference");
  }

  Trajectory out;
  out.max_density = std::max(pi.player_1.max_value(), pi.player_2.max_value());
  out.iterates.push_back(Measure(game, pi, reference, 0));

  const double alpha_0 = config.alpha;
  double alpha = alpha_0;
  std::vector<JointValues> history;
  for (long t = 1; t <= config.iterations; ++t) {
    switch (config.rule) {
      case UpdateRule::kMirrorDescent:
        pi = MdStep(pi, game, config.eta, alpha);
        break;
      case UpdateRule::kFtrl:
        pi = FtrlStep(pi, game, config.eta, alpha);
        break;
      case UpdateRule::kMwu:
        pi = MwuStep(pi, game, config.eta);
        break;
      case UpdateRule::kFtrlCumulative:
        history.push_back(JointMarginals(game, pi));
        pi = FtrlCumulativeStep(history, pi, config.eta, 0.0);
        break;
    }
    out.max_density = std::max(
        {out.max_density, pi.player_1.max_value(), pi.player_2.max_value()});
    if (t % config.decay_interval == 0) {
      alpha = std::max(config.alpha_decay * alpha,
                       config.alpha_floor_fraction * alpha_0);
    }
    if (t % config.record_every == 0 || t == config.iterations) {
      out.iterates.push_back(Measure(game, pi, reference, t));
    }
  }

  if (game.zero_sum() && alpha_0 > 0.0) {
    const double bound =
        ContractionStepSizeBound(out.max_density, alpha_0, game.r_max());
    if (config.eta > bound) {
      std::ostringstream msg;
      msg << "eta = " << config.eta
          << " exceeds the contraction step-size bound " << bound
          << " for the observed max density " << out.max_density;
      out.warnings.push_back(msg.str());
    }
  }
  out.final_policy = std::move(pi);
  return out;
}

}  // namespace porl
