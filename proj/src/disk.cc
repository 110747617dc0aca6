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

#include "disk/disk.h"

#include <random>
#include <sstream>
#include <string>

#include "disk/batch_gradient.h"

namespace disk {
namespace {

void CheckFinite(std::span<const double> g, std::int64_t t, const char* what) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      std::ostringstream os;
      os << what << " is not finite at step " << t << ": component " << i << " = " << g[i]
         << " (norm " << Norm(g) << ")";
      throw NonFiniteGradientError(os.str());
    }
  }
}

void CheckStep(const DiskState& state, const Objective& obj, std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("empty minibatch");
  CheckSameSize(state.x.size(), obj.dim(), "parameters vs objective");
}

// Applies the base optimizer to `direction` and records d = x' - x.
void Advance(DiskState& state, const DiskConfig& cfg, std::span<const double> direction) {
  const Vector before = state.x;
  BaseUpdate(cfg.base, cfg.hyper, cfg.lr, direction, state.x, state.moments);
  state.displacement = Subtract(state.x, before);
  ++state.t;
}

}  // namespace

std::string_view ToString(FilterInit init) {
  return init == FilterInit::kFirstGrad ? "first_grad" : "zero";
}

FilterInit FilterInitFromString(std::string_view name) {
  if (name == "first_grad") return FilterInit::kFirstGrad;
  if (name == "zero") return FilterInit::kZero;
  throw std::invalid_argument("unknown filter_init '" + std::string(name) + "'");
}

void DiskConfig::Validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must be in (0, 1]");
  if (gamma == 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and != 0");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (!(sigma_dp >= 0.0)) throw std::invalid_argument("sigma_dp must be >= 0");
  if (clip != ClipMethod::kNone && !(clip_threshold > 0.0)) {
    throw std::invalid_argument("clip threshold must be > 0");
  }
  hyper.Validate();
}

DiskState DiskState::Init(Vector x0) {
  DiskState s;
  const std::size_t d = x0.size();
  s.x = std::move(x0);
  s.filtered_grad.assign(d, 0.0);
  s.displacement.assign(d, 0.0);
  s.observed_grad.assign(d, 0.0);
  return s;
}

void AddGaussianNoise(double sigma, std::span<double> g, Rng& rng) {
  if (sigma == 0.0) return;
  std::normal_distribution<double> normal;
  for (double& v : g) v += sigma * normal(rng);
}

void DiskStep(DiskState& state, const Objective& obj, const Dataset& data,
              std::span<const std::size_t> batch, const DiskConfig& cfg, Rng& noise_rng) {
  cfg.Validate();
  CheckStep(state, obj, batch);
  const std::size_t d = state.x.size();

  PerSampleRule rule;
  rule.clip = cfg.clip;
  rule.clip_threshold = cfg.clip_threshold;
  Vector lookahead;
  if (cfg.two_point) {
    rule.lookahead_weight = LookaheadCoefficient(cfg.kappa, cfg.gamma);
    if (rule.lookahead_weight != 0.0) {
      lookahead = state.x;
      Axpy(cfg.gamma, state.displacement, lookahead);
      rule.lookahead = lookahead;
    }
  }

  Vector g(d);
  if (cfg.parallel) {
    BatchMeanGradient(obj, data, batch, state.x, rule, g);
  } else {
    BatchMeanGradientSerial(obj, data, batch, state.x, rule, g);
  }
  CheckFinite(g, state.t, "combined gradient");
  AddGaussianNoise(cfg.sigma_dp, g, noise_rng);

  if (!state.filter_primed) {
    if (cfg.filter_init == FilterInit::kFirstGrad) {
      state.filtered_grad = g;
    } else {
      state.filtered_grad.assign(d, 0.0);
    }
    state.filter_primed = true;
  }
  const double keep = 1.0 - cfg.kappa;
  for (std::size_t i = 0; i < d; ++i) {
    state.filtered_grad[i] = keep * state.filtered_grad[i] + cfg.kappa * g[i];
  }
  state.observed_grad = std::move(g);
  Advance(state, cfg, state.filtered_grad);
}

void DpsgdStep(DiskState& state, const Objective& obj, const Dataset& data,
               std::span<const std::size_t> batch, const DiskConfig& cfg, Rng& noise_rng) {
  cfg.Validate();
  CheckStep(state, obj, batch);

  PerSampleRule rule;
  rule.clip = cfg.clip;
  rule.clip_threshold = cfg.clip_threshold;
  Vector g(state.x.size());
  if (cfg.parallel) {
    BatchMeanGradient(obj, data, batch, state.x, rule, g);
  } else {
    BatchMeanGradientSerial(obj, data, batch, state.x, rule, g);
  }
  CheckFinite(g, state.t, "clipped gradient");
  AddGaussianNoise(cfg.sigma_dp, g, noise_rng);

  state.observed_grad = g;
  state.filtered_grad = std::move(g);
  state.filter_primed = true;
  Advance(state, cfg, state.filtered_grad);
}

}  // namespace disk
