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

#include "disk/optimizers.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace disk {

std::string_view ToString(BaseOptimizer base) {
  switch (base) {
    case BaseOptimizer::kSgd:
      return "sgd";
    case BaseOptimizer::kMomentum:
      return "momentum";
    case BaseOptimizer::kAdam:
      return "adam";
    case BaseOptimizer::kAdamW:
      return "adamw";
  }
  return "unknown";
}

BaseOptimizer BaseOptimizerFromString(std::string_view name) {
  if (name == "sgd") return BaseOptimizer::kSgd;
  if (name == "momentum") return BaseOptimizer::kMomentum;
  if (name == "adam") return BaseOptimizer::kAdam;
  if (name == "adamw") return BaseOptimizer::kAdamW;
  throw std::invalid_argument("unknown base optimizer '" + std::string(name) + "'");
}

void BaseHyperparams::Validate() const {
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must be in [0, 1)");
  if (!(adam_eps > 0.0)) throw std::invalid_argument("adam epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be >= 0");
}

void BaseUpdate(BaseOptimizer base, const BaseHyperparams& hp, double lr,
                std::span<const double> g, std::span<double> x, OptimizerMoments& moments) {
  CheckSameSize(g.size(), x.size(), "base update");
  const std::size_t d = x.size();
  ++moments.step;

  const bool coupled_decay = hp.weight_decay > 0.0 && base != BaseOptimizer::kAdamW;
  auto grad = [&](std::size_t i) { return coupled_decay ? g[i] + hp.weight_decay * x[i] : g[i]; };

  switch (base) {
    case BaseOptimizer::kSgd:
      for (std::size_t i = 0; i < d; ++i) x[i] -= lr * grad(i);
      return;
    case BaseOptimizer::kMomentum:
      moments.first.resize(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        moments.first[i] = hp.momentum * moments.first[i] + grad(i);
        x[i] -= lr * moments.first[i];
      }
      return;
    case BaseOptimizer::kAdam:
    case BaseOptimizer::kAdamW: {
      moments.first.resize(d, 0.0);
      moments.second.resize(d, 0.0);
      const double t = static_cast<double>(moments.step);
      const double c1 = 1.0 - std::pow(hp.beta1, t);
      const double c2 = 1.0 - std::pow(hp.beta2, t);
      for (std::size_t i = 0; i < d; ++i) {
        const double gi = grad(i);
        if (base == BaseOptimizer::kAdamW) x[i] -= lr * hp.weight_decay * x[i];
        moments.first[i] = hp.beta1 * moments.first[i] + (1.0 - hp.beta1) * gi;
        moments.second[i] = hp.beta2 * moments.second[i] + (1.0 - hp.beta2) * gi * gi;
        const double m_hat = moments.first[i] / c1;
        const double v_hat = moments.second[i] / c2;
        x[i] -= lr * m_hat / (std::sqrt(v_hat) + hp.adam_eps);
      }
      return;
    }
  }
}

}  // namespace disk
