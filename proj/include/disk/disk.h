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

#ifndef DISK_DISK_H_
#define DISK_DISK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

#include "disk/objectives.h"
#include "disk/optimizers.h"
#include "disk/privacy.h"
#include "disk/rng.h"
#include "disk/vector_ops.h"

namespace disk {

// How g~_{-1} is set before the first step: to the first privatized gradient,
// or to zero (the convention of the full filter and the convergence proof).
enum class FilterInit { kFirstGrad, kZero };

std::string_view ToString(FilterInit init);
FilterInit FilterInitFromString(std::string_view name);

struct DiskConfig {
  double kappa = 1.0;
  double gamma = 1.0;
  double lr = 0.1;
  ClipMethod clip = ClipMethod::kStandard;
  double clip_threshold = 1.0;
  double sigma_dp = 0.0;  // std of the noise added to the averaged clipped gradient
  BaseOptimizer base = BaseOptimizer::kSgd;
  BaseHyperparams hyper;
  FilterInit filter_init = FilterInit::kFirstGrad;
  // false evaluates the gradient at x only, leaving a plain EMA (low-pass)
  // filter on top of the privatized gradient.
  bool two_point = true;
  // Use the OpenMP batch kernel; results are identical either way.
  bool parallel = true;

  // kappa in (0, 1], gamma != 0, lr > 0, sigma_dp >= 0, C > 0 unless clip is none.
  void Validate() const;
};

struct DiskState {
  Vector x;
  Vector filtered_grad;  // g~_{t-1}
  Vector displacement;   // d_{t-1}
  Vector observed_grad;  // g_{t-1}, the privatized observation
  OptimizerMoments moments;
  std::int64_t t = 0;
  bool filter_primed = false;

  static DiskState Init(Vector x0);
};

class NonFiniteGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One DiSK iteration on `batch`:
//   g  = (1/B) sum clip(a grad f(x + gamma d; xi) + (1 - a) grad f(x; xi), C) + w
//   g~ = (1 - kappa) g~ + kappa g
//   x' = BaseUpdate(x, lr, g~),  d = x' - x
// with a = (1 - kappa) / (kappa gamma) and w ~ N(0, sigma_dp^2 I) drawn from
// `noise_rng` (d draws per step, none when sigma_dp == 0).
void DiskStep(DiskState& state, const Objective& obj, const Dataset& data,
              std::span<const std::size_t> batch, const DiskConfig& cfg, Rng& noise_rng);

// Plain DP-SGD: g = (1/B) sum clip(grad f(x; xi), C) + w, x' = BaseUpdate(x, lr, g).
// kappa, gamma and the filter settings in `cfg` are ignored.
void DpsgdStep(DiskState& state, const Objective& obj, const Dataset& data,
               std::span<const std::size_t> batch, const DiskConfig& cfg, Rng& noise_rng);

// Adds sigma * N(0, 1) to every coordinate of `g`; draws nothing when sigma == 0.
void AddGaussianNoise(double sigma, std::span<double> g, Rng& rng);

}  // namespace disk

#endif  // DISK_DISK_H_
