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

#include <gtest/gtest.h>
#include <omp.h>

#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "disk/batch_gradient.h"
#include "disk/harness.h"

namespace disk {
namespace {

// Independent oracle: clip each two-point row and average, in long double.
Vector OracleMean(const Objective& obj, const Dataset& data, const std::vector<std::size_t>& batch,
                  const Vector& x, const Vector& look, double a, ClipMethod clip, double c) {
  std::vector<long double> acc(obj.dim(), 0.0L);
  for (std::size_t i : batch) {
    Vector g = PerSampleGrad(obj, x, data.sample(i));
    if (a != 0.0) {
      const Vector h = PerSampleGrad(obj, look, data.sample(i));
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = a * h[k] + (1.0 - a) * g[k];
    }
    ApplyClip(clip, g, c);
    for (std::size_t k = 0; k < g.size(); ++k) acc[k] += g[k];
  }
  Vector out(obj.dim());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(acc[k] / batch.size());
  return out;
}

struct Case {
  ObjectiveKind kind;
  ClipMethod clip;
  double lookahead_weight;
  std::size_t batch_size;
};

class BatchGradientTest : public ::testing::TestWithParam<Case> {};

TEST_P(BatchGradientTest, ParallelMatchesSerialBitwiseAndOracle) {
  const Case c = GetParam();
  ObjectiveSpec spec;
  spec.kind = c.kind;
  spec.num_samples = 300;
  spec.dim = 6;
  const Problem problem = BuildProblem(spec, 11);
  const Objective& obj = *problem.objective;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Vector x(obj.dim()), look(obj.dim());
  for (double& v : x) v = 0.5 * normal(rng);
  for (double& v : look) v = 0.5 * normal(rng);
  std::vector<std::size_t> batch(c.batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, spec.num_samples - 1);
  for (std::size_t& i : batch) i = pick(rng);

  PerSampleRule rule;
  rule.lookahead_weight = c.lookahead_weight;
  if (c.lookahead_weight != 0.0) rule.lookahead = look;
  rule.clip = c.clip;
  rule.clip_threshold = 0.7;

  Vector serial(obj.dim());
  BatchMeanGradientSerial(obj, problem.data, batch, x, rule, serial);
  const Vector oracle = OracleMean(obj, problem.data, batch, x, look, c.lookahead_weight, c.clip, 0.7);
  for (std::size_t k = 0; k < serial.size(); ++k) {
    EXPECT_NEAR(serial[k], oracle[k], 1e-12 * (1.0 + std::abs(oracle[k])));
  }
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    Vector parallel(obj.dim());
    BatchMeanGradient(obj, problem.data, batch, x, rule, parallel);
    EXPECT_EQ(parallel, serial) << "threads " << threads;
  }
  omp_set_num_threads(saved);
}

std::vector<Case> AllCases() {
  std::vector<Case> cases;
  for (ObjectiveKind kind : {ObjectiveKind::kQuadratic, ObjectiveKind::kLinearRegression,
                             ObjectiveKind::kLogisticRegression, ObjectiveKind::kMlp}) {
    for (ClipMethod clip : {ClipMethod::kNone, ClipMethod::kStandard, ClipMethod::kAutomatic,
                            ClipMethod::kNormalized}) {
      for (double a : {0.0, 1.0, -2.5}) {
        for (std::size_t b : {1u, 17u, 256u}) cases.push_back({kind, clip, a, b});
      }
    }
  }
  return cases;
}

std::string CaseName(const ::testing::TestParamInfo<Case>& info) {
  std::string name = std::string(ToString(info.param.kind)) + "_" +
                     std::string(ToString(info.param.clip)) + "_a" +
                     std::to_string(static_cast<int>(info.param.lookahead_weight * 10)) + "_b" +
                     std::to_string(info.param.batch_size);
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return name;
}

INSTANTIATE_TEST_SUITE_P(AllKernels, BatchGradientTest, ::testing::ValuesIn(AllCases()), CaseName);

TEST(BatchGradientCheckTest, RejectsShapeErrors) {
  ObjectiveSpec spec;
  spec.num_samples = 10;
  spec.dim = 3;
  const Problem problem = BuildProblem(spec, 1);
  const std::vector<std::size_t> batch = {0, 1};
  const std::vector<std::size_t> empty;
  Vector x(3, 0.0), out(3), wrong(2);
  PerSampleRule rule;
  EXPECT_THROW(BatchMeanGradient(*problem.objective, problem.data, empty, x, rule, out),
               std::invalid_argument);
  EXPECT_THROW(BatchMeanGradient(*problem.objective, problem.data, batch, wrong, rule, out),
               std::invalid_argument);
  rule.lookahead_weight = 0.5;  // look-ahead point missing
  EXPECT_THROW(BatchMeanGradient(*problem.objective, problem.data, batch, x, rule, out),
               std::invalid_argument);
}

}  // namespace
}  // namespace disk
