// Copyright 2026 The DiSK Authors.
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
//

#include "disk/full_kf.h"

#include <stdexcept>
#include <string>

#include "disk/batch_gradient.h"
#include "disk/disk.h"
#include "disk/kalman.h"

namespace disk {
namespace {

Vector HessianInput(const FullKfState& state, const Objective& obj, const Dataset& data,
                    std::span<const std::size_t> batch, const FullKfConfig& cfg) {
  const std::size_t d = state.x.size();
  Vector out(d, 0.0);
  if (cfg.hessian_mode == HessianMode::kExact) {
    Vector hv(d);
    for (std::size_t idx : batch) {
      obj.HessianVectorProduct(state.x, data.sample(idx), state.displacement, hv);
      Axpy(1.0, hv, out);
    }
    Scale(1.0 / static_cast<double>(batch.size()), out);
    return out;
  }
  Vector shifted = state.x;
  Axpy(cfg.fd_step, state.displacement, shifted);
  Vector g_shift(d);
  Vector g_here(d);
  for (std::size_t idx : batch) {
    const SampleView s = data.sample(idx);
    obj.Gradient(shifted, s, g_shift);
    obj.Gradient(state.x, s, g_here);
    for (std::size_t i = 0; i < d; ++i) out[i] += (g_shift[i] - g_here[i]) / cfg.fd_step;
  }
  Scale(1.0 / static_cast<double>(batch.size()), out);
  return out;
}

Eigen::Map<const Eigen::VectorXd> AsEigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string_view ToString(HessianMode mode) {
  return mode == HessianMode::kExact ? "exact" : "finite-difference";
}

HessianMode HessianModeFromString(std::string_view name) {
  if (name == "exact") return HessianMode::kExact;
  if (name == "finite-difference") return HessianMode::kFiniteDifference;
  throw std::invalid_argument("unknown hessian mode '" + std::string(name) + "'");
}

void FullKfConfig::Validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (!(sigma_dp >= 0.0)) throw std::invalid_argument("sigma_dp must be >= 0");
  if (clip != ClipMethod::kNone && !(clip_threshold > 0.0)) {
    throw std::invalid_argument("clip threshold must be > 0");
  }
  if (!(sigma_w2 > 0.0)) throw std::invalid_argument("sigma_w^2 must be > 0");
  if (!(sigma_h2 >= 0.0 && sigma_v2 >= 0.0)) throw std::invalid_argument("sigma_H^2, sigma_v^2 must be >= 0");
  if (fd_step == 0.0) throw std::invalid_argument("finite-difference step must be != 0");
  if (p_init && !(*p_init >= 0.0)) throw std::invalid_argument("p_init must be >= 0");
  hyper.Validate();
}

FullKfState FullKfState::Init(Vector x0, const FullKfConfig& cfg) {
  const std::size_t d = x0.size();
  if (static_cast<Eigen::Index>(d) > kMaxFilterDim) {
    throw std::invalid_argument("full Kalman filter optimizer is capped at d <= 64 (got d = " +
                                std::to_string(d) + ")");
  }
  FullKfState s;
  s.x = std::move(x0);
  s.filtered_grad.assign(d, 0.0);
  s.predicted_grad.assign(d, 0.0);
  s.displacement.assign(d, 0.0);
  s.observed_grad.assign(d, 0.0);
  const auto n = static_cast<Eigen::Index>(d);
  s.covariance = cfg.p_init.value_or(cfg.sigma_w2) * Eigen::MatrixXd::Identity(n, n);
  return s;
}

void FullKfStep(FullKfState& state, const Objective& obj, const Dataset& data,
                std::span<const std::size_t> batch, const FullKfConfig& cfg, Rng& noise_rng) {
  cfg.Validate();
  if (batch.empty()) throw std::invalid_argument("empty minibatch");
  CheckSameSize(state.x.size(), obj.dim(), "parameters vs objective");
  const std::size_t d = state.x.size();
  const auto n = static_cast<Eigen::Index>(d);
  if (n > kMaxFilterDim) throw std::invalid_argument("full Kalman filter optimizer is capped at d <= 64");
  if (cfg.hessian_mode == HessianMode::kExact && !obj.HasHessianVectorProduct()) {
    throw std::invalid_argument("exact Hessian mode needs an objective with Hessian-vector products");
  }

  // Observation.
  PerSampleRule rule;
  rule.clip = cfg.clip;
  rule.clip_threshold = cfg.clip_threshold;
  Vector g(d);
  BatchMeanGradient(obj, data, batch, state.x, rule, g);
  if (!AllFinite(g)) throw NonFiniteGradientError("gradient observation is not finite");
  AddGaussianNoise(cfg.sigma_dp, g, noise_rng);

  // Prediction.
  const Vector hd = HessianInput(state, obj, data, batch, cfg);
  for (std::size_t i = 0; i < d; ++i) state.predicted_grad[i] = state.filtered_grad[i] + hd[i];
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd p_pred = state.covariance + (cfg.sigma_h2 + cfg.sigma_v2) * eye;

  // Gain and correction.
  state.gain = KfGainAlg2(p_pred, eye, Eigen::MatrixXd::Zero(n, n), cfg.sigma_w2, cfg.sigma_h2 * eye);
  const Eigen::VectorXd pred = AsEigen(state.predicted_grad);
  const Eigen::VectorXd corrected = pred + state.gain * (AsEigen(g) - pred);
  for (std::size_t i = 0; i < d; ++i) state.filtered_grad[i] = corrected(static_cast<Eigen::Index>(i));
  state.observed_grad = std::move(g);

  // Parameter update.
  const Vector before = state.x;
  BaseUpdate(cfg.base, cfg.hyper, cfg.lr, state.filtered_grad, state.x, state.moments);
  state.displacement = Subtract(state.x, before);

  state.covariance = (eye - state.gain) * p_pred;
  Symmetrize(state.covariance);
  ++state.t;
}

}  // namespace disk
