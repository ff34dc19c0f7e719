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

#include "porl/param_policy.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "porl/error.h"

namespace porl {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2 pi) / 2
constexpr double kEdgeRejection = 1e-9;

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

void RequireDim(const SquashedGaussian& policy, std::size_t dim,
                const char* who) {
  policy.Validate();
  if (dim != policy.action_dim()) {
    throw ValueError(std::string(who) + ": dimension mismatch");
  }
}

double CheckedQ(const QFunction& q, std::span<const double> a) {
  const double v = q.value(a);
  if (!std::isfinite(v)) throw ValueError("Q function returned non-finite value");
  return v;
}

std::vector<double> QGradient(const QFunction& q, std::span<const double> a) {
  if (q.gradient) {
    std::vector<double> g = q.gradient(a);
    for (double v : g) {
      if (!std::isfinite(v)) {
        throw ValueError("Q gradient returned non-finite value");
      }
    }
    return g;
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double h = 1e-6;
    const double saved = x[i];
    x[i] = saved + h;
    const double up = CheckedQ(q, x);
    x[i] = saved - h;
    const double down = CheckedQ(q, x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Per-sample pieces shared by the objective and its gradient.
struct SamplePoint {
  std::vector<double> u;
  std::vector<double> a;
  double log_prob_theta = 0.0;
  double log_prob_prev = 0.0;
};

SamplePoint Evaluate(const SquashedGaussian& theta,
                     const SquashedGaussian& prev,
                     std::span<const double> eps) {
  SamplePoint p;
  const std::size_t dim = eps.size();
  p.u.resize(dim);
  p.a.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double sigma = std::exp(theta.log_sigma[i]);
    const double u = theta.mu[i] + sigma * eps[i];
    const double correction = LogOneMinusTanhSquared(u);
    const double z = (u - prev.mu[i]) / std::exp(prev.log_sigma[i]);
    p.u[i] = u;
    p.a[i] = std::tanh(u);
    p.log_prob_theta +=
        -0.5 * eps[i] * eps[i] - theta.log_sigma[i] - kHalfLog2Pi - correction;
    p.log_prob_prev +=
        -0.5 * z * z - prev.log_sigma[i] - kHalfLog2Pi - correction;
  }
  return p;
}

struct Weights {
  double theta;  // coefficient on log pi_theta
  double prev;   // coefficient on log pi_prev
};

Weights ObjectiveWeights(const ObjectiveParams& params) {
  if (!(params.eta > 0.0)) throw ConfigError("objective: eta must be positive");
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha)) {
    throw ConfigError("objective: alpha must be non-negative");
  }
  const double inv_eta = std::isinf(params.eta) ? 0.0 : 1.0 / params.eta;
  if (params.anchor == EntropyAnchor::kCurrent) {
    return {inv_eta + params.alpha, -inv_eta};
  }
  return {inv_eta, params.alpha - inv_eta};
}

}  // namespace

void SquashedGaussian::Validate() const {
  if (mu.empty() || mu.size() != log_sigma.size()) {
    throw ValueError("SquashedGaussian: mu and log_sigma dimensions differ");
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double sigma = std::exp(log_sigma[i]);
    if (!std::isfinite(mu[i]) || !(sigma > 0.0) || !std::isfinite(sigma)) {
      throw ValueError("SquashedGaussian: parameters must be finite");
    }
  }
}

double LogOneMinusTanhSquared(double u) {
  return 2.0 * (std::numbers::ln2 - u - Softplus(-2.0 * u));
}

std::vector<double> Sample(const SquashedGaussian& policy,
                           std::span<const double> noise) {
  RequireDim(policy, noise.size(), "Sample");
  std::vector<double> a(noise.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = std::tanh(policy.mu[i] + std::exp(policy.log_sigma[i]) * noise[i]);
  }
  return a;
}

double LogProb(const SquashedGaussian& policy, std::span<const double> action) {
  RequireDim(policy, action.size(), "LogProb");
  double lp = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (!(std::abs(action[i]) < 1.0 - kEdgeRejection)) {
      throw DomainError("LogProb: action component outside (-1, 1)");
    }
    const double u = std::atanh(action[i]);
    const double z = (u - policy.mu[i]) / std::exp(policy.log_sigma[i]);
    lp += -0.5 * z * z - policy.log_sigma[i] - kHalfLog2Pi -
          LogOneMinusTanhSquared(u);
  }
  return lp;
}

std::vector<std::string> BuiltinQFunctionNames() {
  return {"linear", "quadratic"};
}

QFunction BuiltinQFunction(std::string_view name, const KernelParams& params,
                           std::size_t action_dim) {
  auto vector_param = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return std::vector<double>(action_dim, fallback);
    if (it->second.size() == 1) {
      return std::vector<double>(action_dim, it->second.front());
    }
    if (it->second.size() != action_dim) {
      throw ConfigError("q parameter '" + key + "' has the wrong dimension");
    }
    return it->second;
  };
  auto require_keys = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, unused] : params) {
      bool ok = false;
      for (auto k : allowed) ok = ok || key == k;
      if (!ok) {
        throw ConfigError("q function '" + std::string(name) +
                          "': unknown parameter '" + key + "'");
      }
    }
  };

  if (name == "quadratic") {
    require_keys({"center", "scale"});
    const std::vector<double> center = vector_param("center", 0.0);
    const auto scale_it = params.find("scale");
    const double scale =
        scale_it == params.end() ? 1.0 : scale_it->second.at(0);
    QFunction q;
    q.value = [center, scale](std::span<const double> a) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - center[i]) * (a[i] - center[i]);
      }
      return -scale * s;
    };
    q.gradient = [center, scale](std::span<const double> a) {
      std::vector<double> g(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        g[i] = -2.0 * scale * (a[i] - center[i]);
      }
      return g;
    };
    return q;
  }
  if (name == "linear") {
    require_keys({"slope"});
    const std::vector<double> slope = vector_param("slope", 1.0);
    QFunction q;
    q.value = [slope](std::span<const double> a) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += slope[i] * a[i];
      return s;
    };
    q.gradient = [slope](std::span<const double>) { return slope; };
    return q;
  }
  throw ConfigError("unknown q function '" + std::string(name) + "'");
}

NoiseBatch::NoiseBatch(std::size_t dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.empty() || data_.size() % dim_ != 0) {
    throw ValueError("NoiseBatch: data size must be a positive multiple of dim");
  }
}

NoiseBatch NoiseBatch::Draw(std::size_t size, std::size_t dim,
                            std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> data(size * dim);
  for (double& v : data) v = normal(rng);
  return NoiseBatch(dim, std::move(data));
}

double Objective(const SquashedGaussian& theta,
                 const SquashedGaussian& pi_prev, const QFunction& q,
                 const ObjectiveParams& params, const NoiseBatch& noise) {
  RequireDim(theta, noise.dim(), "Objective");
  RequireDim(pi_prev, noise.dim(), "Objective");
  const Weights w = ObjectiveWeights(params);
  double sum = 0.0;
  for (std::size_t k = 0; k < noise.size(); ++k) {
    const SamplePoint p = Evaluate(theta, pi_prev, noise.sample(k));
    sum += w.theta * p.log_prob_theta + w.prev * p.log_prob_prev -
           CheckedQ(q, p.a);
  }
  return sum / static_cast<double>(noise.size());
}

double PolicyGradient::norm() const {
  double s = 0.0;
  for (double v : mu) s += v * v;
  for (double v : log_sigma) s += v * v;
  return std::sqrt(s);
}

PolicyGradient ObjectiveGradient(const SquashedGaussian& theta,
                                 const SquashedGaussian& pi_prev,
                                 const QFunction& q,
                                 const ObjectiveParams& params,
                                 const NoiseBatch& noise) {
  RequireDim(theta, noise.dim(), "ObjectiveGradient");
  RequireDim(pi_prev, noise.dim(), "ObjectiveGradient");
  const Weights w = ObjectiveWeights(params);
  const std::size_t dim = noise.dim();
  PolicyGradient grad{std::vector<double>(dim, 0.0),
                      std::vector<double>(dim, 0.0)};

  for (std::size_t k = 0; k < noise.size(); ++k) {
    const auto eps = noise.sample(k);
    const SamplePoint p = Evaluate(theta, pi_prev, eps);
    const std::vector<double> dq = QGradient(q, p.a);
    for (std::size_t i = 0; i < dim; ++i) {
      const double sigma = std::exp(theta.log_sigma[i]);
      const double prev_sigma = std::exp(pi_prev.log_sigma[i]);
      const double tanh_u = p.a[i];
      const double da_du = std::exp(LogOneMinusTanhSquared(p.u[i]));
      // Written in eps, log pi_theta = sum -eps^2/2 - log_sigma - c - g(u)
      // with g'(u) = -2 tanh(u).
      const double dlp_theta_du = 2.0 * tanh_u;
      const double dlp_prev_du =
          -(p.u[i] - pi_prev.mu[i]) / (prev_sigma * prev_sigma) + 2.0 * tanh_u;
      const double dq_du = dq[i] * da_du;
      const double d_du =
          w.theta * dlp_theta_du + w.prev * dlp_prev_du - dq_du;
      grad.mu[i] += d_du;
      // du/dlog_sigma = sigma * eps; log pi_theta also carries -log_sigma.
      grad.log_sigma[i] += d_du * sigma * eps[i] - w.theta;
    }
  }
  const double n = static_cast<double>(noise.size());
  for (double& v : grad.mu) v /= n;
  for (double& v : grad.log_sigma) v /= n;
  return grad;
}

void ParamTrainConfig::Validate() const {
  if (!(eta > 0.0)) throw ConfigError("param_policy: eta must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("param_policy: alpha must be >= 0");
  if (outer_iterations < 0 || steps_per_anchor < 1 || batch_size < 1) {
    throw ConfigError(
        "param_policy: outer_iterations >= 0, steps_per_anchor >= 1 and "
        "batch_size >= 1 required");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("param_policy: learning_rate must be positive");
  }
}

namespace {

class Adam {
 public:
  explicit Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void Step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  double lr_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace

ParamTrainResult TrainParamPolicy(
    const QFunction& q, SquashedGaussian initial,
    const ParamTrainConfig& config,
    const std::function<void(long, const SquashedGaussian&)>& on_anchor) {
  config.Validate();
  initial.Validate();
  const std::size_t dim = initial.action_dim();
  const ObjectiveParams params{config.eta, config.alpha,
                               EntropyAnchor::kCurrent};
  std::mt19937_64 rng(config.seed);
  Adam adam(2 * dim, config.learning_rate);

  ParamTrainResult result{std::move(initial), {}};
  SquashedGaussian& theta = result.policy;
  std::vector<double> flat(2 * dim);
  std::vector<double> flat_grad(2 * dim);
  for (long outer = 0; outer < config.outer_iterations; ++outer) {
    const SquashedGaussian anchor = theta;
    double last = 0.0;
    for (long step = 0; step < config.steps_per_anchor; ++step) {
      const NoiseBatch noise = NoiseBatch::Draw(config.batch_size, dim, rng);
      const PolicyGradient g = ObjectiveGradient(theta, anchor, q, params, noise);
      for (std::size_t i = 0; i < dim; ++i) {
        flat[i] = theta.mu[i];
        flat[dim + i] = theta.log_sigma[i];
        flat_grad[i] = g.mu[i];
        flat_grad[dim + i] = g.log_sigma[i];
      }
      adam.Step(flat, flat_grad);
      for (std::size_t i = 0; i < dim; ++i) {
        theta.mu[i] = flat[i];
        theta.log_sigma[i] = flat[dim + i];
      }
      if (step + 1 == config.steps_per_anchor) {
        last = Objective(theta, anchor, q, params, noise);
      }
    }
    result.objective_history.push_back(last);
    if (on_anchor) on_anchor(outer + 1, theta);
  }
  return result;
}

Density DiscretizePolicy(const SquashedGaussian& policy, SupportPtr grid) {
  if (!grid || grid->dimension() != policy.action_dim()) {
    throw SupportMismatchError("DiscretizePolicy: grid dimension mismatch");
  }
  std::vector<double> logits(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    logits[i] = LogProb(policy, grid->cell(i).center);
  }
  return Density::FromLogits(std::move(grid), std::move(logits));
}

}  // namespace porl
