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
#include <numeric>
#include <random>
#include <vector>

#include "disk/privacy.h"

namespace disk {
namespace {

double NormalCdf(long double x) {
  return static_cast<double>(0.5L * std::erfc(-x / std::sqrt(2.0L)));
}

// Definition-2 condition evaluated independently in extended precision.
double PhiCondition(double delta_sens, double eps, double sigma) {
  const long double a = static_cast<long double>(delta_sens) / (2.0L * sigma);
  const long double b = static_cast<long double>(eps) * sigma / delta_sens;
  return NormalCdf(a - b) - static_cast<double>(std::exp(static_cast<long double>(eps))) * NormalCdf(-a - b);
}

Vector RandomVector(std::size_t d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  for (double& e : v) e = scale * normal(rng);
  return v;
}

TEST(ClipTest, StandardExamples) {
  const Vector big = ClipStandard(Vector{3, 4}, 1.0);
  EXPECT_DOUBLE_EQ(big[0], 0.6);
  EXPECT_DOUBLE_EQ(big[1], 0.8);
  EXPECT_EQ(ClipStandard(Vector{0.3, 0.4}, 1.0), (Vector{0.3, 0.4}));
  EXPECT_EQ(ClipStandard(Vector{0, 0}, 1.0), (Vector{0, 0}));
}

TEST(ClipTest, AutomaticExamples) {
  const Vector up = ClipAutomatic(Vector{0.3, 0.4}, 1.0);
  EXPECT_DOUBLE_EQ(up[0], 0.6);
  EXPECT_DOUBLE_EQ(up[1], 0.8);
  EXPECT_EQ(ClipAutomatic(Vector{0, 0}, 1.0), (Vector{0, 0}));
}

TEST(ClipTest, NormalizedExamples) {
  const Vector a = ClipNormalized(Vector{3, 4}, 2.0);
  EXPECT_DOUBLE_EQ(a[0], 0.6);
  EXPECT_DOUBLE_EQ(a[1], 0.8);
  EXPECT_EQ(ClipNormalized(Vector{0.3, 0.4}, 1.0), (Vector{0.3, 0.4}));
}

TEST(ClipTest, RejectsNonPositiveThreshold) {
  EXPECT_THROW(ClipStandard(Vector{1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(ClipAutomatic(Vector{1.0}, -1.0), std::invalid_argument);
}

TEST(ClipTest, DirectionPreservedAndNormBounded) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  for (std::size_t d : {1, 10, 1000}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector g = RandomVector(d, std::pow(10.0, log_scale(rng)), rng);
      const double c = std::pow(10.0, log_scale(rng));
      const double norm = Norm(g);
      struct Case {
        Vector out;
        double bound;
      };
      const Case cases[] = {{ClipStandard(g, c), c},
                            {ClipAutomatic(g, c), c},
                            {ClipNormalized(g, c), 1.0}};
      for (const Case& k : cases) {
        EXPECT_LE(Norm(k.out), k.bound * (1 + 1e-12));
        // out = s g with s >= 0.
        const double s = Dot(k.out, g) / (norm * norm);
        EXPECT_GE(s, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
          EXPECT_NEAR(k.out[i], s * g[i], 1e-12 * (std::abs(s * g[i]) + 1e-300));
        }
      }
    }
  }
}

// Enumerates every batch of size B <= 4 drawn from 6 vectors.
TEST(SensitivityTest, BatchMeanBoundsByEnumeration) {
  std::mt19937_64 rng(3);
  std::vector<Vector> pool;
  for (int i = 0; i < 7; ++i) pool.push_back(RandomVector(3, 5.0, rng));
  const double c = 1.0;
  for (ClipMethod method : {ClipMethod::kStandard, ClipMethod::kAutomatic}) {
    for (std::size_t b = 1; b <= 4; ++b) {
      const double sens = BatchMeanSensitivity(method, c, b);
      EXPECT_DOUBLE_EQ(sens, c / static_cast<double>(b));
      std::vector<int> mask(6, 0);
      std::fill(mask.begin(), mask.begin() + static_cast<long>(b), 1);
      std::sort(mask.begin(), mask.end());
      do {
        Vector sum(3, 0.0);
        for (int i = 0; i < 6; ++i) {
          if (!mask[i]) continue;
          Vector g = pool[i];
          ApplyClip(method, g, c);
          Axpy(1.0, g, sum);
        }
        for (int i = 0; i < 6; ++i) {
          if (!mask[i]) continue;
          Vector removed = pool[i];
          ApplyClip(method, removed, c);
          // Dropping sample i from the sum, normalised by B.
          EXPECT_LE(Norm(removed) / static_cast<double>(b), sens * (1 + 1e-12));
          // Replacing sample i by the held-out vector.
          Vector added = pool[6];
          ApplyClip(method, added, c);
          EXPECT_LE(Norm(Subtract(added, removed)) / static_cast<double>(b),
                    2.0 * sens * (1 + 1e-12));
        }
      } while (std::next_permutation(mask.begin(), mask.end()));
    }
  }
}

// Under replacement the C/B figure is not an upper bound: antipodal samples
// move the batch mean by 2C/B.
TEST(SensitivityTest, ReplacementCanReachTwiceTheAddRemoveValue) {
  Vector a = {3.0, 0.0}, b = {-3.0, 0.0};
  ApplyClip(ClipMethod::kStandard, a, 1.0);
  ApplyClip(ClipMethod::kStandard, b, 1.0);
  EXPECT_DOUBLE_EQ(Norm(Subtract(a, b)) / 2.0, 2.0 * BatchMeanSensitivity(ClipMethod::kStandard, 1.0, 2));
}

TEST(SensitivityTest, UnclippedIsInfinite) {
  EXPECT_TRUE(std::isinf(BatchMeanSensitivity(ClipMethod::kNone, 1.0, 4)));
  EXPECT_DOUBLE_EQ(BatchMeanSensitivity(ClipMethod::kNormalized, 7.0, 4), 0.25);
}

TEST(CalibrateGaussianTest, BelowClassicalBound) {
  const double sigma = CalibrateGaussian(1.0, 1.0, 1e-6);
  EXPECT_NEAR(ClassicalGaussianSigma(1.0, 1.0, 1e-6), 5.2993, 1e-3);
  EXPECT_LT(sigma, ClassicalGaussianSigma(1.0, 1.0, 1e-6));
}

TEST(CalibrateGaussianTest, ConditionTightAndMinimal) {
  for (double eps : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double sigma = CalibrateGaussian(1.0, eps, 1e-6);
    const double slack = PhiCondition(1.0, eps, sigma) - 1e-6;
    EXPECT_LE(slack, 0.0) << "eps " << eps;
    EXPECT_GE(slack, -1e-8) << "eps " << eps;
    EXPECT_GT(PhiCondition(1.0, eps, sigma * (1 - 1e-6)), 1e-6) << "eps " << eps;
  }
}

TEST(CalibrateGaussianTest, HomogeneousInSensitivity) {
  const double s1 = CalibrateGaussian(1.0, 1.0, 1e-5);
  const double s2 = CalibrateGaussian(2.0, 1.0, 1e-5);
  EXPECT_NEAR(s2, 2.0 * s1, 4e-9);
}

TEST(CalibrateGaussianTest, RejectsBadInputs) {
  EXPECT_THROW(CalibrateGaussian(0.0, 1.0, 1e-5), std::invalid_argument);
  EXPECT_THROW(CalibrateGaussian(1.0, 0.0, 1e-5), std::invalid_argument);
  EXPECT_THROW(CalibrateGaussian(1.0, 1.0, 1.0), std::invalid_argument);
}

TEST(RdpTest, GaussianExamples) {
  EXPECT_DOUBLE_EQ(RdpGaussian(1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(RdpGaussian(2.0, 8.0), 1.0);
  EXPECT_LT(RdpGaussian(1.0, 2.0), RdpGaussian(1.0, 3.0));
  EXPECT_GT(RdpGaussian(1.0, 2.0), RdpGaussian(1.5, 2.0));
}

TEST(RdpTest, FullSamplingReducesToGaussian) {
  for (double sigma : {0.5, 1.0, 3.0}) {
    for (double a : DefaultOrders()) {
      const int ia = static_cast<int>(a);
      EXPECT_NEAR(RdpSubsampled(1.0, sigma, ia), RdpGaussian(sigma, a), 1e-12);
    }
  }
}

TEST(RdpTest, SubsamplingAmplifies) {
  const double v = RdpSubsampled(0.01, 1.0, 2);
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 1.0);
}

TEST(RdpTest, RejectsOrderBelowTwo) {
  EXPECT_THROW(RdpSubsampled(0.5, 1.0, 1), std::invalid_argument);
}

// Direct evaluation of the binomial-expansion bound with exact integer
// binomials and no log-space tricks.
TEST(RdpTest, MatchesDirectSummation) {
  const long double q = 0.01L, sigma = 2.0L;
  const int alpha = 16;
  auto eps = [&](int j) { return j / (2.0L * sigma * sigma); };
  auto binom = [](int n, int k) {
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  long double sum = 1.0L;
  sum += q * q * binom(alpha, 2) *
         std::min(4.0L * (std::exp(eps(2)) - 1.0L), 2.0L * std::exp(eps(2)));
  for (int j = 3; j <= alpha; ++j) {
    sum += 2.0L * std::pow(q, j) * binom(alpha, j) * std::exp((j - 1) * eps(j));
  }
  const double oracle = static_cast<double>(std::log(sum) / (alpha - 1));
  EXPECT_NEAR(RdpSubsampled(0.01, 2.0, alpha), oracle, 1e-10);
}

TEST(ComposeTest, ContinuousOrderOptimum) {
  // Minimising a/2 + ln(1/delta)/(a-1) gives 1/2 + sqrt(2 ln(1/delta)).
  const double expected = 0.5 + std::sqrt(2.0 * std::log(1e5));
  RdpCurve fine;
  for (double a = 1.01; a < 40.0; a += 1e-4) {
    fine.orders.push_back(a);
    fine.values.push_back(RdpGaussian(1.0, a));
  }
  EXPECT_NEAR(expected, 5.298, 1e-3);
  EXPECT_NEAR(ComposeAndConvert(fine, 1, 1e-5).epsilon, expected, 1e-6);
  // The integer grid can only be looser.
  const double grid = ComposeAndConvert(SubsampledGaussianCurve(1.0, 1.0), 1, 1e-5).epsilon;
  EXPECT_GE(grid, expected);
  EXPECT_LE(grid, expected + 0.01);
}

TEST(ComposeTest, MonotoneInStepsAndCurve) {
  const RdpCurve curve = SubsampledGaussianCurve(0.02, 1.1);
  double last = 0.0;
  for (std::int64_t t : {1, 10, 100, 1000, 10000}) {
    const double e = ComposeAndConvert(curve, t, 1e-5).epsilon;
    EXPECT_GE(e, last);
    last = e;
  }
  RdpCurve bumped = curve;
  for (std::size_t i = 0; i < bumped.values.size(); ++i) {
    RdpCurve one = curve;
    one.values[i] *= 1.5;
    EXPECT_GE(ComposeAndConvert(one, 100, 1e-5).epsilon,
              ComposeAndConvert(curve, 100, 1e-5).epsilon);
  }
}

TEST(ComposeTest, DeltaOneRemovesConversionPenalty) {
  const RdpCurve curve = SubsampledGaussianCurve(0.05, 1.0);
  const double min_rdp = *std::min_element(curve.values.begin(), curve.values.end());
  EXPECT_NEAR(ComposeAndConvert(curve, 50, 1.0).epsilon, 50 * min_rdp, 1e-12);
}

TEST(CalibrateNoiseTest, RoundTrip) {
  for (double eps : {0.5, 1.0, 3.0}) {
    const double z = CalibrateNoiseMultiplier(eps, 1e-5, 0.01, 1000);
    const double back = ComposeAndConvert(SubsampledGaussianCurve(0.01, z), 1000, 1e-5).epsilon;
    EXPECT_LE(back, eps);
    EXPECT_NEAR(back, eps, 1e-3);
  }
}

TEST(CalibrateNoiseTest, NonIncreasingInEpsilon) {
  double last = std::numeric_limits<double>::infinity();
  for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double z = CalibrateNoiseMultiplier(eps, 1e-5, 0.01, 500);
    EXPECT_LE(z, last);
    last = z;
  }
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

TEST(CalibrateNoiseTest, GrowsWithSteps) {
  for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    double last = 0.0;
    for (std::int64_t t : {100, 300, 1000, 3000, 10000}) {
      const double z = CalibrateNoiseMultiplier(eps, 1e-5, 0.01, t);
      EXPECT_GT(z, last) << "eps " << eps << " T " << t;
      last = z;
    }
  }
}

// Theorem 1 predicts sigma^2 proportional to T. With the binomial-expansion
// bound the j >= 3 terms leave a sigma-independent floor, so for large q T the
// unsubsampled Gaussian curve takes over and the law holds exactly.
TEST(CalibrateNoiseTest, SquareRootLawOnceAmplificationSaturates) {
  std::vector<double> log_t, log_z;
  for (std::int64_t t : {1000, 3000, 10000}) {
    const double z = CalibrateNoiseMultiplier(0.5, 1e-5, 0.01, t);
    const RdpCurve curve = SubsampledGaussianCurve(0.01, z);
    const PrivacySpent spent = ComposeAndConvert(curve, t, 1e-5);
    ASSERT_DOUBLE_EQ(RdpSubsampled(0.01, z, static_cast<int>(spent.order)),
                     RdpGaussian(z, spent.order));
    log_t.push_back(std::log(static_cast<double>(t)));
    log_z.push_back(std::log(z));
  }
  EXPECT_NEAR(LogLogSlope(log_t, log_z), 0.5, 0.01);
}

TEST(CalibrateNoiseTest, InfeasibleBudgetReportsSigmaMax) {
  try {
    CalibrateNoiseMultiplier(1e-6, 1e-5, 1.0, 100000, 10.0);
    FAIL() << "expected InfeasibleBudgetError";
  } catch (const InfeasibleBudgetError& e) {
    EXPECT_DOUBLE_EQ(e.sigma_max(), 10.0);
    EXPECT_GT(e.epsilon_at_max(), 1e-6);
    EXPECT_NE(std::string(e.what()).find("sigma_max"), std::string::npos);
  }
}

TEST(Theorem1SigmaTest, Scaling) {
  EXPECT_DOUBLE_EQ(Theorem1Sigma(1.0, 1, 1, 1.0, std::exp(-1.0), 1.0), 1.0);
  EXPECT_NEAR(Theorem1Sigma(1.0, 400, 100, 1.0, 1e-5, 2.0),
              2.0 * Theorem1Sigma(1.0, 100, 100, 1.0, 1e-5, 2.0), 1e-12);
  EXPECT_NEAR(Theorem1Sigma(1.0, 100, 200, 1.0, 1e-5, 2.0),
              0.5 * Theorem1Sigma(1.0, 100, 100, 1.0, 1e-5, 2.0), 1e-12);
}

TEST(DeltaConventionTest, PublishedValues) {
  EXPECT_NEAR(DeltaConvention(50000), 6.8e-6, 0.05e-6);
  EXPECT_NEAR(DeltaConvention(60000), 5.5e-6, 0.05e-6);
  EXPECT_THROW(DeltaConvention(1), std::invalid_argument);
}

}  // namespace
}  // namespace disk
