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

// Serial reference vs OpenMP batch kernel on the same inputs.

#include <benchmark/benchmark.h>

#include <memory>
#include <numeric>
#include <vector>

#include "disk/batch_gradient.h"
#include "disk/objectives.h"

namespace {

struct Fixture {
  std::unique_ptr<disk::Objective> obj;
  disk::Dataset data;
  std::vector<std::size_t> batch;
  disk::Vector x;
  disk::Vector lookahead;
};

Fixture MakeFixture(bool mlp, std::size_t batch_size) {
  Fixture f;
  const std::size_t p = 64;
  f.data = disk::GenLinearRegression(4096, p, 0.1, 7).data;
  f.obj = mlp ? disk::MakeMlp(p, 16) : disk::MakeLogisticRegression(p);
  f.batch.resize(batch_size);
  std::iota(f.batch.begin(), f.batch.end(), std::size_t{0});
  f.x.assign(f.obj->dim(), 0.01);
  f.lookahead.assign(f.obj->dim(), 0.02);
  return f;
}

template <bool kParallel>
void BM_BatchMeanGradient(benchmark::State& state) {
  const Fixture f = MakeFixture(state.range(0) == 1, static_cast<std::size_t>(state.range(1)));
  disk::PerSampleRule rule;
  rule.lookahead_weight = 1.5;
  rule.lookahead = f.lookahead;
  rule.clip = disk::ClipMethod::kStandard;
  rule.clip_threshold = 1.0;
  disk::Vector out(f.obj->dim());
  for (auto _ : state) {
    if constexpr (kParallel) {
      disk::BatchMeanGradient(*f.obj, f.data, f.batch, f.x, rule, out);
    } else {
      disk::BatchMeanGradientSerial(*f.obj, f.data, f.batch, f.x, rule, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

// Args: {objective (0 = logistic, 1 = mlp), batch size}.
void Grid(benchmark::internal::Benchmark* b) {
  for (int mlp : {0, 1}) {
    for (int batch : {64, 512, 4096}) b->Args({mlp, batch});
  }
}

BENCHMARK(BM_BatchMeanGradient<false>)->Name("serial")->Apply(Grid);
BENCHMARK(BM_BatchMeanGradient<true>)->Name("openmp")->Apply(Grid);

}  // namespace

BENCHMARK_MAIN();
