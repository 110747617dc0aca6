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

#ifndef DISK_OPTIMIZERS_H_
#define DISK_OPTIMIZERS_H_

#include <cstdint>
#include <span>
#include <string_view>

#include "disk/vector_ops.h"

namespace disk {

enum class BaseOptimizer { kSgd, kMomentum, kAdam, kAdamW };

std::string_view ToString(BaseOptimizer base);
BaseOptimizer BaseOptimizerFromString(std::string_view name);

struct BaseHyperparams {
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // L2 penalty added to the gradient for sgd/momentum/adam; decoupled for adamw.
  double weight_decay = 0.0;

  void Validate() const;
};

struct OptimizerMoments {
  Vector first;   // momentum buffer or Adam m
  Vector second;  // Adam v
  std::int64_t step = 0;
};

// One step of the base optimizer on gradient g, in place on x.
//   sgd:      x -= lr g
//   momentum: v = mu v + g;  x -= lr v
//   adam:     bias-corrected m / (sqrt(v) + eps)
//   adamw:    x -= lr wd x, then the adam step
void BaseUpdate(BaseOptimizer base, const BaseHyperparams& hp, double lr,
                std::span<const double> g, std::span<double> x, OptimizerMoments& moments);

}  // namespace disk

#endif  // DISK_OPTIMIZERS_H_
