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

#ifndef PORL_PARAM_POLICY_H_
#define PORL_PARAM_POLICY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "porl/density.h"
#include "porl/games.h"

namespace porl {

// Diagonal Gaussian pushed through tanh: a = tanh(mu + exp(log_sigma) * eps).
struct SquashedGaussian {
  std::vector<double> mu;
  std::vector<double> log_sigma;

  std::size_t action_dim() const { return mu.size(); }
  // Throws ValueError unless dimensions agree and sigma is positive finite.
  void Validate() const;
};

// log(1 - tanh(u)^2) = 2 * (log 2 - u - softplus(-2u)).
double LogOneMinusTanhSquared(double u);

std::vector<double> Sample(const SquashedGaussian& policy,
                           std::span<const double> noise);

// Change-of-variables log density of a squashed action. Components within
// 1e-9 of +-1 are rejected with DomainError.
double LogProb(const SquashedGaussian& policy, std::span<const double> action);

// Action-value function with an optional analytic gradient. Without one the
// gradient falls back to central differences.
struct QFunction {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

// Built-in action values:
//   "quadratic" q(a) = -scale * |a - center|^2 (params: center, scale)
//   "linear"    q(a) = <slope, a>              (params: slope)
QFunction BuiltinQFunction(std::string_view name, const KernelParams& params,
                           std::size_t action_dim);
std::vector<std::string> BuiltinQFunctionNames();

// Standard-normal noise, `size` samples of dimension `dim`, row-major.
class NoiseBatch {
 public:
  NoiseBatch(std::size_t dim, std::vector<double> data);

  static NoiseBatch Draw(std::size_t size, std::size_t dim,
                         std::mt19937_64& rng);

  std::size_t size() const { return data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> sample(std::size_t k) const {
    return std::span<const double>(data_).subspan(k * dim_, dim_);
  }

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

// Which policy carries the alpha-weighted log-probability term.
enum class EntropyAnchor {
  // alpha * log pi_theta(a): the mirror-descent objective.
  kCurrent,
  // alpha * log pi_prev(a): the incremental regularized-leader variant.
  kPrevious,
};

struct ObjectiveParams {
  // May be +infinity, which drops the KL term.
  double eta = 10.0;
  double alpha = 0.1;
  EntropyAnchor anchor = EntropyAnchor::kCurrent;
};

// Empirical mean over the batch of
//   (1/eta) (log pi_theta(a) - log pi_prev(a)) - Q(a) + alpha log pi_theta(a)
// with a = Sample(theta, eps).
double Objective(const SquashedGaussian& theta,
                 const SquashedGaussian& pi_prev, const QFunction& q,
                 const ObjectiveParams& params, const NoiseBatch& noise);

struct PolicyGradient {
  std::vector<double> mu;
  std::vector<double> log_sigma;

  double norm() const;
};

// Pathwise (reparameterized) gradient of Objective with respect to mu and
// log_sigma on the same batch.
PolicyGradient ObjectiveGradient(const SquashedGaussian& theta,
                                 const SquashedGaussian& pi_prev,
                                 const QFunction& q,
                                 const ObjectiveParams& params,
                                 const NoiseBatch& noise);

struct ParamTrainConfig {
  double eta = 10.0;
  double alpha = 0.1;
  // Anchor refreshes (pi_prev <- theta).
  long outer_iterations = 200;
  // Gradient steps between refreshes.
  long steps_per_anchor = 100;
  long batch_size = 256;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct ParamTrainResult {
  SquashedGaussian policy;
  // Objective value on the last batch of each anchor period.
  std::vector<double> objective_history;
};

// Adam on the objective with a fresh noise batch per gradient step; the
// objective and its gradient share that batch.
ParamTrainResult TrainParamPolicy(
    const QFunction& q, SquashedGaussian initial, const ParamTrainConfig& config,
    const std::function<void(long, const SquashedGaussian&)>& on_anchor = {});

// Density of the policy evaluated at the cell centers of `grid` and
// renormalized on it.
Density DiscretizePolicy(const SquashedGaussian& policy, SupportPtr grid);

}  // namespace porl

#endif  // PORL_PARAM_POLICY_H_
