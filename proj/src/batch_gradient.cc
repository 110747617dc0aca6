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

#include "disk/batch_gradient.h"

#include <stdexcept>
#include <vector>

namespace disk {
namespace {

void Validate(const Objective& obj, const Dataset& data, std::span<const std::size_t> batch,
              std::span<const double> x, const PerSampleRule& rule, std::span<double> out) {
  if (batch.empty()) throw std::invalid_argument("batch gradient: empty batch");
  CheckSameSize(x.size(), obj.dim(), "batch gradient (parameters)");
  CheckSameSize(out.size(), obj.dim(), "batch gradient (output)");
  CheckSameSize(data.feature_dim(), obj.feature_dim(), "batch gradient (features)");
  if (rule.lookahead_weight != 0.0) {
    CheckSameSize(rule.lookahead.size(), obj.dim(), "batch gradient (look-ahead)");
  }
  for (std::size_t idx : batch) {
    if (idx >= data.size()) throw std::out_of_range("batch gradient: sample index out of range");
  }
}

// Row for one sample; `tmp` is scratch of size d.
inline void SampleRow(const Objective& obj, const SampleView& s, std::span<const double> x,
                      const PerSampleRule& rule, std::span<double> row, std::span<double> tmp) {
  obj.Gradient(x, s, row);
  const double a = rule.lookahead_weight;
  if (a != 0.0) {
    obj.Gradient(rule.lookahead, s, tmp);
    const double b = 1.0 - a;
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = a * tmp[k] + b * row[k];
  }
  ApplyClip(rule.clip, row, rule.clip_threshold);
}

void ReduceRows(std::span<const double> rows, std::size_t count, std::span<double> out) {
  const std::size_t d = out.size();
  for (std::size_t k = 0; k < d; ++k) out[k] = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    const double* row = rows.data() + r * d;
    for (std::size_t k = 0; k < d; ++k) out[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t k = 0; k < d; ++k) out[k] *= inv;
}

}  // namespace

void BatchMeanGradientSerial(const Objective& obj, const Dataset& data,
                             std::span<const std::size_t> batch, std::span<const double> x,
                             const PerSampleRule& rule, std::span<double> out) {
  Validate(obj, data, batch, x, rule, out);
  const std::size_t d = obj.dim();
  std::vector<double> rows(batch.size() * d);
  std::vector<double> tmp(d);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    SampleRow(obj, data.sample(batch[r]), x, rule, std::span<double>(rows).subspan(r * d, d), tmp);
  }
  ReduceRows(rows, batch.size(), out);
}

void BatchMeanGradient(const Objective& obj, const Dataset& data,
                       std::span<const std::size_t> batch, std::span<const double> x,
                       const PerSampleRule& rule, std::span<double> out) {
  Validate(obj, data, batch, x, rule, out);
  const std::size_t d = obj.dim();
  const auto count = static_cast<std::ptrdiff_t>(batch.size());
  std::vector<double> rows(batch.size() * d);
#pragma omp parallel
  {
    std::vector<double> tmp(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
      const auto ru = static_cast<std::size_t>(r);
      SampleRow(obj, data.sample(batch[ru]), x, rule, std::span<double>(rows).subspan(ru * d, d),
                tmp);
    }
  }
  ReduceRows(rows, batch.size(), out);
}

}  // namespace disk
