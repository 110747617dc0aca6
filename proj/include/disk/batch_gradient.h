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

#ifndef DISK_BATCH_GRADIENT_H_
#define DISK_BATCH_GRADIENT_H_

#include <cstddef>
#include <span>

#include "disk/objectives.h"
#include "disk/privacy.h"
#include "disk/vector_ops.h"

namespace disk {

// What each sample contributes to the batch mean:
//   clip(a * grad f(lookahead; xi) + (1 - a) * grad f(x; xi), C).
// With a == 0 the look-ahead point is never evaluated.
struct PerSampleRule {
  double lookahead_weight = 0.0;     // a
  std::span<const double> lookahead;  // x + gamma d_prev; may be empty when a == 0
  ClipMethod clip = ClipMethod::kNone;
  double clip_threshold = 0.0;
};

// Serial reference: per-sample rows are formed one after another and then
// summed in batch order.
void BatchMeanGradientSerial(const Objective& obj, const Dataset& data,
                             std::span<const std::size_t> batch, std::span<const double> x,
                             const PerSampleRule& rule, std::span<double> out);

// OpenMP kernel: per-sample rows are formed in parallel into a scratch block,
// then summed in batch order. Bit-identical to the serial reference for any
// thread count.
void BatchMeanGradient(const Objective& obj, const Dataset& data,
                       std::span<const std::size_t> batch, std::span<const double> x,
                       const PerSampleRule& rule, std::span<double> out);

}  // namespace disk

#endif  // DISK_BATCH_GRADIENT_H_
