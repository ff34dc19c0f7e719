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

#ifndef PORL_DYNAMICS_H_
#define PORL_DYNAMICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "porl/density.h"
#include "porl/games.h"
#include "porl/trajectory.h"

namespace porl {

// Policy update rules. All are computed in log space.
enum class UpdateRule {
  // Proximal (KL-regularized) mirror descent with entropy regularization:
  //   log pi' = (eta * nu + log pi) / (eta * alpha + 1) - log Z.
  kMirrorDescent,
  // Incremental regularized-leader form:
  //   log pi' = (1 - eta * alpha) * log pi + eta * nu - log Z.
  kFtrl,
  // Cumulative leader over the payoff history (alpha = 0 only):
  //   log pi' = eta * sum_k nu_k - log Z.
  kFtrlCumulative,
  // Multiplicative weights: log pi' = log pi + eta * nu - log Z.
  kMwu,
};

std::string_view ToString(UpdateRule rule);
// Accepts "md", "ftrl", "ftrl_cumulative", "mwu".
UpdateRule ParseUpdateRule(std::string_view name);

struct DynamicsConfig {
  double eta = 0.1;
  double alpha = 0.2;
  // alpha <- max(alpha_decay * alpha, alpha_floor_fraction * alpha_0) every
  // decay_interval steps.
  double alpha_floor_fraction = 0.1;
  double alpha_decay = 1.0;
  long decay_interval = 1000;
  UpdateRule rule = UpdateRule::kMirrorDescent;
  long iterations = 1000;
  std::uint64_t seed = 0;
  long record_every = 1;

  // Throws ConfigError on violated invariants. MWU requires alpha == 0,
  // FTRL requires eta * alpha < 1, and the cumulative form requires
  // alpha == 0.
  void Validate() const;
};

// Per-player payoff vectors of the current joint policy.
struct JointValues {
  ValueVector player_1;
  ValueVector player_2;
};

// nu_i = MarginalQ(game, i, pi_{-i}) for both players. Throws ValueError on a
// non-finite entry.
JointValues JointMarginals(const MatrixGame& game, const JointPolicy& pi);

// Simultaneous mirror-descent step for both players; each maximizes its own
// payoff plus alpha times its entropy, with KL(., pi_t) / eta as proximal
// term.
JointPolicy MdStep(const JointPolicy& pi, const MatrixGame& game, double eta,
                   double alpha);

// Incremental regularized-leader step. Requires eta * alpha < 1.
JointPolicy FtrlStep(const JointPolicy& pi, const MatrixGame& game, double eta,
                     double alpha);

// Plain multiplicative weights.
JointPolicy MwuStep(const JointPolicy& pi, const MatrixGame& game, double eta);

// Cumulative regularized-leader policy after observing `history`. `pi` only
// supplies the supports. Only alpha == 0 is supported
// (UnsupportedConfigError otherwise); an empty history yields uniform.
JointPolicy FtrlCumulativeStep(std::span<const JointValues> history,
                               const JointPolicy& pi, double eta,
                               double alpha);

// Largest step size for which the last-iterate KL contraction is guaranteed:
// min{1 / b^2, alpha^2 / (b^2 L^4)}.
double ContractionStepSizeBound(double b, double alpha, double value_bound);

// Iterates `config.rule` from `initial` (uniform by default), recording
// metrics at t = 0, every record_every steps, and at the final step.
// kl_to_reference is KL(reference, pi_t) summed over both players.
Trajectory RunDynamics(const MatrixGame& game, const DynamicsConfig& config,
                       const std::optional<JointPolicy>& reference = {},
                       const std::optional<JointPolicy>& initial = {});

// Metrics of a single joint policy.
TrajectoryPoint Measure(const MatrixGame& game, const JointPolicy& pi,
                        const std::optional<JointPolicy>& reference, long t);

// KL summed over both players.
double JointKl(const JointPolicy& p, const JointPolicy& q);

}  // namespace porl

#endif  // PORL_DYNAMICS_H_
