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

#ifndef DISK_FULL_KF_H_
#define DISK_FULL_KF_H_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "disk/objectives.h"
#include "disk/optimizers.h"
#include "disk/privacy.h"
#include "disk/rng.h"
#include "disk/vector_ops.h"

namespace disk {

// How the prediction input H d_{t-1} is obtained.
enum class HessianMode {
  kExact,             // batch mean of exact Hessian-vector products
  kFiniteDifference,  // (1/B) sum (grad f(x + gamma d) - grad f(x)) / gamma
};

std::string_view ToString(HessianMode mode);
HessianMode HessianModeFromString(std::string_view name);

// The full-matrix Kalman-filtered optimizer with E[C] = I and Sigma_C = 0.
// Covariances are isotropic: Sigma_H = sigma_h2 I, Sigma_v = sigma_v2 I.
struct FullKfConfig {
  double lr = 0.1;
  ClipMethod clip = ClipMethod::kNone;
  double clip_threshold = 1.0;
  double sigma_dp = 0.0;
  BaseOptimizer base = BaseOptimizer::kSgd;
  BaseHyperparams hyper;
  double sigma_w2 = 1.0;
  double sigma_h2 = 0.0;
  double sigma_v2 = 0.0;
  HessianMode hessian_mode = HessianMode::kFiniteDifference;
  double fd_step = 1.0;  // gamma of the finite difference
  // P_{-1} = p_init I; defaults to sigma_w2.
  std::optional<double> p_init;

  void Validate() const;
};

struct FullKfState {
  Vector x;
  Vector filtered_grad;   // g~_{t-1}, zero before the first step
  Vector predicted_grad;  // g~_{t|t-1} of the last step
  Vector displacement;    // d_{t-1}
  Vector observed_grad;   // g_{t-1}
  Eigen::MatrixXd covariance;  // P_{t-1}
  Eigen::MatrixXd gain;        // K of the last step
  OptimizerMoments moments;
  std::int64_t t = 0;

  // Rejects d > 64.
  static FullKfState Init(Vector x0, const FullKfConfig& cfg);
};

void FullKfStep(FullKfState& state, const Objective& obj, const Dataset& data,
                std::span<const std::size_t> batch, const FullKfConfig& cfg, Rng& noise_rng);

}  // namespace disk

#endif  // DISK_FULL_KF_H_
