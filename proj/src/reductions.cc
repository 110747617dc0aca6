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

#include "disk/reductions.h"

#include <stdexcept>

namespace disk {

void NagStep(NagState& state, double mu, double lr, const Objective& obj, const Dataset& data,
             std::optional<double> lookahead) {
  CheckSameSize(state.x.size(), obj.dim(), "nag parameters");
  CheckSameSize(state.m.size(), obj.dim(), "nag momentum");
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("nag: mu must be in [0, 1)");
  if (!(lr > 0.0)) throw std::invalid_argument("nag: lr must be > 0");
  const double c = lookahead.value_or(mu);

  Vector probe = state.x;
  Axpy(-c, state.m, probe);
  const Vector grad = FullGradient(obj, probe, data);
  for (std::size_t i = 0; i < state.m.size(); ++i) {
    state.m[i] = mu * state.m[i] + lr * grad[i];
    state.x[i] -= state.m[i];
  }
}

StormState StormInit(const Objective& obj, Vector x0, const SampleView& first) {
  StormState s;
  s.m = PerSampleGrad(obj, x0, first);
  s.x_prev = x0;
  s.x = std::move(x0);
  return s;
}

void StormStep(StormState& state, double alpha, double lr, const Objective& obj,
               const SampleView& sample) {
  CheckSameSize(state.x.size(), obj.dim(), "storm parameters");
  CheckSameSize(state.x_prev.size(), obj.dim(), "storm previous parameters");
  CheckSameSize(state.m.size(), obj.dim(), "storm momentum");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("storm: alpha must be in (0, 1]");
  if (!(lr > 0.0)) throw std::invalid_argument("storm: lr must be > 0");

  const Vector g_now = PerSampleGrad(obj, state.x, sample);
  const Vector g_prev = PerSampleGrad(obj, state.x_prev, sample);
  const double keep = 1.0 - alpha;
  for (std::size_t i = 0; i < state.m.size(); ++i) {
    state.m[i] = keep * state.m[i] + alpha * g_now[i] + keep * (g_now[i] - g_prev[i]);
  }
  state.x_prev = state.x;
  Axpy(-lr, state.m, state.x);
}

}  // namespace disk
