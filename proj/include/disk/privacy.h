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

#ifndef DISK_PRIVACY_H_
#define DISK_PRIVACY_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "disk/vector_ops.h"

namespace disk {

// ---------------------------------------------------------------------------
// Clipping
// ---------------------------------------------------------------------------

enum class ClipMethod { kNone, kStandard, kAutomatic, kNormalized };

std::string_view ToString(ClipMethod method);
ClipMethod ClipMethodFromString(std::string_view name);

// min{1, C/|g|} g. Zero passes through.
Vector ClipStandard(std::span<const double> g, double threshold);
// g C/|g|; the zero vector maps to zero.
Vector ClipAutomatic(std::span<const double> g, double threshold);
// (g/C) min{C/|g|, 1}; output norm <= 1.
Vector ClipNormalized(std::span<const double> g, double threshold);

// In-place variant used by the batch kernels. kNone ignores the threshold.
void ApplyClip(ClipMethod method, std::span<double> g, double threshold);

// L2 sensitivity of the batch mean (1/B) sum clip(g_i) when one sample is
// added or removed (twice that under replacement). Infinite for kNone.
double BatchMeanSensitivity(ClipMethod method, double threshold, std::size_t batch_size);

// ---------------------------------------------------------------------------
// Gaussian mechanism
// ---------------------------------------------------------------------------

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  // Throws unless epsilon > 0 and 0 < delta < 1.
  void Validate() const;
};

// delta achieved by N(0, sigma^2) noise on a query of sensitivity `sensitivity`:
// Phi(D/(2s) - e s/D) - e^eps Phi(-D/(2s) - e s/D).
double GaussianDelta(double sensitivity, double epsilon, double sigma);

// Smallest sigma with GaussianDelta(sensitivity, epsilon, sigma) <= delta,
// found by bisection to 1e-9 absolute.
double CalibrateGaussian(double sensitivity, double epsilon, double delta);

// sqrt(2 ln(1.25/delta)) sensitivity / epsilon.
double ClassicalGaussianSigma(double sensitivity, double epsilon, double delta);

// ---------------------------------------------------------------------------
// Renyi DP accounting (noise multiplier = sigma / sensitivity)
// ---------------------------------------------------------------------------

// alpha / (2 sigma^2).
double RdpGaussian(double noise_multiplier, double order);

// RDP of the Gaussian mechanism applied to a fixed-size subsample drawn
// without replacement at rate q, at integer order >= 2. Uses the
// binomial-expansion upper bound for subsampling without replacement, capped
// by the unsubsampled value (which it reduces to at q = 1).
double RdpSubsampled(double sampling_rate, double noise_multiplier, int order);

// The default grid: 2..64 plus 128, 256, 512.
std::vector<double> DefaultOrders();

struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;  // per-step RDP at each order
};

RdpCurve SubsampledGaussianCurve(double sampling_rate, double noise_multiplier,
                                 const std::vector<double>& orders = DefaultOrders());

struct PrivacySpent {
  double epsilon = 0.0;
  double order = 0.0;  // minimising order
};

// min over orders of steps * curve(alpha) + ln(1/delta) / (alpha - 1).
PrivacySpent ComposeAndConvert(const RdpCurve& curve, std::int64_t steps, double delta);

class InfeasibleBudgetError : public std::runtime_error {
 public:
  InfeasibleBudgetError(double epsilon_target, double sigma_max, double epsilon_at_max);
  double sigma_max() const { return sigma_max_; }
  double epsilon_at_max() const { return epsilon_at_max_; }

 private:
  double sigma_max_;
  double epsilon_at_max_;
};

inline constexpr double kDefaultMaxNoiseMultiplier = 1000.0;

// Smallest noise multiplier (to 1e-4, and to within 1e-4 of the target in
// epsilon) such that T compositions of the subsampled Gaussian mechanism
// spend at most `epsilon_target`. Throws InfeasibleBudgetError when even
// `sigma_max` is not enough.
double CalibrateNoiseMultiplier(double epsilon_target, double delta, double sampling_rate,
                                std::int64_t steps,
                                double sigma_max = kDefaultMaxNoiseMultiplier);

// sqrt(v C^2 T ln(1/delta)) / (N eps). Only meaningful for scaling laws; the
// constant v is unknown.
double Theorem1Sigma(double clip, std::int64_t steps, std::int64_t n, double epsilon,
                     double delta, double v);

// delta = 1 / N^1.1; rejects N <= 1.
double DeltaConvention(std::int64_t n);

}  // namespace disk

#endif  // DISK_PRIVACY_H_
