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

#include <cmath>

#include "disk/optimizers.h"

namespace disk {
namespace {

TEST(BaseOptimizerTest, NamesRoundTrip) {
  for (BaseOptimizer b : {BaseOptimizer::kSgd, BaseOptimizer::kMomentum, BaseOptimizer::kAdam,
                          BaseOptimizer::kAdamW}) {
    EXPECT_EQ(BaseOptimizerFromString(ToString(b)), b);
  }
  EXPECT_THROW(BaseOptimizerFromString("rmsprop"), std::invalid_argument);
}

TEST(BaseUpdateTest, SgdStep) {
  Vector x = {1.0, -2.0};
  OptimizerMoments m;
  BaseUpdate(BaseOptimizer::kSgd, {}, 0.5, Vector{2.0, 4.0}, x, m);
  EXPECT_EQ(x, (Vector{0.0, -4.0}));
  EXPECT_EQ(m.step, 1);
}

TEST(BaseUpdateTest, MomentumTwoSteps) {
  BaseHyperparams hp;
  hp.momentum = 0.5;
  Vector x = {0.0};
  OptimizerMoments m;
  BaseUpdate(BaseOptimizer::kMomentum, hp, 0.1, Vector{1.0}, x, m);
  EXPECT_DOUBLE_EQ(x[0], -0.1);
  BaseUpdate(BaseOptimizer::kMomentum, hp, 0.1, Vector{1.0}, x, m);
  // v = 0.5 * 1 + 1 = 1.5
  EXPECT_DOUBLE_EQ(m.first[0], 1.5);
  EXPECT_DOUBLE_EQ(x[0], -0.25);
}

TEST(BaseUpdateTest, AdamFirstStepIsSignStep) {
  Vector x = {0.0, 0.0};
  OptimizerMoments m;
  BaseUpdate(BaseOptimizer::kAdam, {}, 0.01, Vector{3.0, -0.2}, x, m);
  EXPECT_NEAR(x[0], -0.01, 1e-10);
  EXPECT_NEAR(x[1], 0.01, 1e-9);
}

TEST(BaseUpdateTest, AdamConstantGradientGivesSignSteps) {
  const double lr = 0.01;
  Vector x = {0.0, 0.0, 0.0};
  const Vector g = {5.0, -0.3, 1e-2};
  OptimizerMoments m;
  Vector before = x;
  for (int t = 0; t < 500; ++t) {
    before = x;
    BaseUpdate(BaseOptimizer::kAdam, {}, lr, g, x, m);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double step = before[i] - x[i];
    EXPECT_NEAR(step, lr * (g[i] > 0 ? 1.0 : -1.0), 1e-3 * lr) << i;
  }
}

TEST(BaseUpdateTest, AdamMatchesHandRecursion) {
  BaseHyperparams hp;
  const double lr = 0.05;
  const Vector grads[] = {{1.0}, {-2.0}, {0.5}};
  Vector x = {0.3};
  OptimizerMoments mo;
  double m = 0.0, v = 0.0, ref = 0.3;
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1][0];
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    ref -= lr * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    BaseUpdate(BaseOptimizer::kAdam, hp, lr, grads[t - 1], x, mo);
    EXPECT_NEAR(x[0], ref, 1e-15);
  }
}

TEST(BaseUpdateTest, AdamWZeroGradientShrinks) {
  BaseHyperparams hp;
  hp.weight_decay = 0.1;
  Vector x = {2.0, -4.0};
  OptimizerMoments m;
  BaseUpdate(BaseOptimizer::kAdamW, hp, 0.5, Vector{0.0, 0.0}, x, m);
  EXPECT_DOUBLE_EQ(x[0], 2.0 * (1 - 0.05));
  EXPECT_DOUBLE_EQ(x[1], -4.0 * (1 - 0.05));
}

TEST(BaseUpdateTest, CoupledDecayForSgd) {
  BaseHyperparams hp;
  hp.weight_decay = 0.1;
  Vector x = {2.0};
  OptimizerMoments m;
  BaseUpdate(BaseOptimizer::kSgd, hp, 0.5, Vector{1.0}, x, m);
  EXPECT_DOUBLE_EQ(x[0], 2.0 - 0.5 * (1.0 + 0.2));
}

TEST(BaseUpdateTest, DimensionMismatchThrows) {
  Vector x = {1.0};
  OptimizerMoments m;
  EXPECT_THROW(BaseUpdate(BaseOptimizer::kSgd, {}, 0.1, Vector{1.0, 2.0}, x, m),
               std::invalid_argument);
}

TEST(BaseHyperparamsTest, Validate) {
  BaseHyperparams hp;
  EXPECT_NO_THROW(hp.Validate());
  hp.beta2 = 1.0;
  EXPECT_THROW(hp.Validate(), std::invalid_argument);
  hp = {};
  hp.weight_decay = -1.0;
  EXPECT_THROW(hp.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace disk
