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

#ifndef DISK_REDUCTIONS_H_
#define DISK_REDUCTIONS_H_

#include <optional>

#include "disk/objectives.h"
#include "disk/vector_ops.h"

namespace disk {

// Half-shifted Nesterov momentum on the full objective.
struct NagState {
  Vector x;
  Vector m;
};

// m' = mu m + lr grad F(x - c m),  x' = x - m'.
// The look-ahead coefficient c defaults to mu (the textbook form).
void NagStep(NagState& state, double mu, double lr, const Objective& obj, const Dataset& data,
             std::optional<double> lookahead = std::nullopt);

// Recursive momentum on a single sample per step.
struct StormState {
  Vector x;
  Vector x_prev;
  Vector m;
};

// Starts at x0 with x_prev = x0 and m = grad f(x0; first), so the first
// StormStep on `first` returns m = grad f(x0; first).
StormState StormInit(const Objective& obj, Vector x0, const SampleView& first);

// m' = (1 - alpha) m + alpha grad f(x; xi) + (1 - alpha)(grad f(x; xi) - grad f(x_prev; xi))
// x' = x - lr m'
void StormStep(StormState& state, double alpha, double lr, const Objective& obj,
               const SampleView& sample);

}  // namespace disk

#endif  // DISK_REDUCTIONS_H_
