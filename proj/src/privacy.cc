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

#include "disk/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace disk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckThreshold(double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("clip threshold must be > 0");
}

double StandardNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double LogSumExp(const std::vector<double>& terms) {
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace

std::string_view ToString(ClipMethod method) {
  switch (method) {
    case ClipMethod::kNone:
      return "none";
    case ClipMethod::kStandard:
      return "standard";
    case ClipMethod::kAutomatic:
      return "automatic";
    case ClipMethod::kNormalized:
      return "normalized";
  }
  return "unknown";
}

ClipMethod ClipMethodFromString(std::string_view name) {
  if (name == "none") return ClipMethod::kNone;
  if (name == "standard") return ClipMethod::kStandard;
  if (name == "automatic") return ClipMethod::kAutomatic;
  if (name == "normalized") return ClipMethod::kNormalized;
  throw std::invalid_argument("unknown clip method: " + std::string(name));
}

void ApplyClip(ClipMethod method, std::span<double> g, double threshold) {
  if (method == ClipMethod::kNone) return;
  CheckThreshold(threshold);
  const double norm = Norm(g);
  if (norm == 0.0) return;
  double factor = 1.0;
  switch (method) {
    case ClipMethod::kStandard:
      factor = std::min(1.0, threshold / norm);
      break;
    case ClipMethod::kAutomatic:
      factor = threshold / norm;
      break;
    case ClipMethod::kNormalized:
      factor = std::min(threshold / norm, 1.0) / threshold;
      break;
    case ClipMethod::kNone:
      break;
  }
  if (factor != 1.0) Scale(factor, g);
}

Vector ClipStandard(std::span<const double> g, double threshold) {
  Vector out(g.begin(), g.end());
  ApplyClip(ClipMethod::kStandard, out, threshold);
  return out;
}

Vector ClipAutomatic(std::span<const double> g, double threshold) {
  Vector out(g.begin(), g.end());
  ApplyClip(ClipMethod::kAutomatic, out, threshold);
  return out;
}

Vector ClipNormalized(std::span<const double> g, double threshold) {
  Vector out(g.begin(), g.end());
  ApplyClip(ClipMethod::kNormalized, out, threshold);
  return out;
}

double BatchMeanSensitivity(ClipMethod method, double threshold, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  const auto b = static_cast<double>(batch_size);
  switch (method) {
    case ClipMethod::kNone:
      return kInf;
    case ClipMethod::kStandard:
    case ClipMethod::kAutomatic:
      CheckThreshold(threshold);
      return threshold / b;
    case ClipMethod::kNormalized:
      return 1.0 / b;
  }
  return kInf;
}

void PrivacyBudget::Validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double GaussianDelta(double sensitivity, double epsilon, double sigma) {
  const double a = sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / sensitivity;
  return StandardNormalCdf(a - b) - std::exp(epsilon) * StandardNormalCdf(-a - b);
}

double CalibrateGaussian(double sensitivity, double epsilon, double delta) {
  if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be > 0");
  PrivacyBudget{epsilon, delta}.Validate();
  double lo = 0.0;
  double hi = sensitivity;
  while (GaussianDelta(sensitivity, epsilon, hi) > delta) {
    lo = hi;
    hi *= 2.0;
  }
  constexpr double kTolerance = 1e-9;
  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= kTolerance) return hi;
    const double mid = 0.5 * (lo + hi);
    if (GaussianDelta(sensitivity, epsilon, mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw std::logic_error("calibrate_gaussian: bisection did not converge in 200 iterations");
}

double ClassicalGaussianSigma(double sensitivity, double epsilon, double delta) {
  return std::sqrt(2.0 * std::log(1.25 / delta)) * sensitivity / epsilon;
}

double RdpGaussian(double noise_multiplier, double order) {
  if (!(noise_multiplier > 0.0)) throw std::invalid_argument("noise multiplier must be > 0");
  if (!(order > 1.0)) throw std::invalid_argument("RDP order must be > 1");
  return order / (2.0 * noise_multiplier * noise_multiplier);
}

double RdpSubsampled(double sampling_rate, double noise_multiplier, int order) {
  if (order < 2) throw std::invalid_argument("subsampled RDP needs an integer order >= 2");
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    throw std::invalid_argument("sampling rate must lie in (0, 1]");
  }
  const double full = RdpGaussian(noise_multiplier, order);
  if (sampling_rate == 1.0) return full;

  const double inv_two_var = 1.0 / (2.0 * noise_multiplier * noise_multiplier);
  const double log_q = std::log(sampling_rate);
  const double eps2 = 2.0 * inv_two_var;

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(order));
  terms.push_back(0.0);
  // j = 2: q^2 C(a,2) min{4(e^{eps(2)} - 1), 2 e^{eps(2)}}
  const double log_min2 = std::min(std::log(4.0) + std::log(std::expm1(eps2)), std::log(2.0) + eps2);
  terms.push_back(2.0 * log_q + LogBinomial(order, 2) + log_min2);
  // j >= 3: 2 q^j C(a,j) e^{(j-1) eps(j)}; the infinite-order RDP of the
  // Gaussian is unbounded so min{2, (e^{eps(inf)} - 1)^j} = 2.
  for (int j = 3; j <= order; ++j) {
    const double eps_j = j * inv_two_var;
    terms.push_back(std::log(2.0) + j * log_q + LogBinomial(order, j) + (j - 1) * eps_j);
  }
  const double bound = LogSumExp(terms) / (order - 1);
  return std::min(bound, full);
}

std::vector<double> DefaultOrders() {
  std::vector<double> orders;
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  orders.push_back(128);
  orders.push_back(256);
  orders.push_back(512);
  return orders;
}

RdpCurve SubsampledGaussianCurve(double sampling_rate, double noise_multiplier,
                                 const std::vector<double>& orders) {
  RdpCurve curve;
  curve.orders = orders;
  curve.values.reserve(orders.size());
  for (double a : orders) {
    const int ia = static_cast<int>(a);
    if (static_cast<double>(ia) != a) throw std::invalid_argument("accountant orders must be integers");
    curve.values.push_back(RdpSubsampled(sampling_rate, noise_multiplier, ia));
  }
  return curve;
}

PrivacySpent ComposeAndConvert(const RdpCurve& curve, std::int64_t steps, double delta) {
  if (curve.orders.empty() || curve.orders.size() != curve.values.size()) {
    throw std::invalid_argument("compose_and_convert: malformed RDP curve");
  }
  if (steps < 0) throw std::invalid_argument("compose_and_convert: steps must be >= 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  PrivacySpent best{kInf, curve.orders.front()};
  const double log_inv_delta = std::log(1.0 / delta);
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double a = curve.orders[i];
    if (!(a > 1.0)) throw std::invalid_argument("RDP order must be > 1");
    const double eps = static_cast<double>(steps) * curve.values[i] + log_inv_delta / (a - 1.0);
    if (eps < best.epsilon) best = {eps, a};
  }
  return best;
}

InfeasibleBudgetError::InfeasibleBudgetError(double epsilon_target, double sigma_max,
                                             double epsilon_at_max)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "budget infeasible at sigma <= sigma_max = " << sigma_max << ": epsilon target "
           << epsilon_target << " but sigma_max still spends " << epsilon_at_max;
        return os.str();
      }()),
      sigma_max_(sigma_max),
      epsilon_at_max_(epsilon_at_max) {}

double CalibrateNoiseMultiplier(double epsilon_target, double delta, double sampling_rate,
                                std::int64_t steps, double sigma_max) {
  PrivacyBudget{epsilon_target, delta}.Validate();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(sigma_max > 0.0)) throw std::invalid_argument("sigma_max must be > 0");
  const auto spent = [&](double z) {
    return ComposeAndConvert(SubsampledGaussianCurve(sampling_rate, z), steps, delta).epsilon;
  };
  const double at_max = spent(sigma_max);
  if (at_max > epsilon_target) throw InfeasibleBudgetError(epsilon_target, sigma_max, at_max);

  constexpr double kSigmaTolerance = 1e-4;
  constexpr double kEpsilonTolerance = 1e-4;
  double lo = 0.0;  // spends infinitely much
  double hi = sigma_max;
  double eps_hi = at_max;
  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= kSigmaTolerance && epsilon_target - eps_hi <= kEpsilonTolerance) break;
    const double mid = 0.5 * (lo + hi);
    const double eps_mid = spent(mid);
    if (eps_mid <= epsilon_target) {
      hi = mid;
      eps_hi = eps_mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double Theorem1Sigma(double clip, std::int64_t steps, std::int64_t n, double epsilon,
                     double delta, double v) {
  if (!(clip > 0.0) || steps < 1 || n < 1 || !(v > 0.0)) {
    throw std::invalid_argument("theorem1_sigma: C, T, N and v must be positive");
  }
  PrivacyBudget{epsilon, delta}.Validate();
  return std::sqrt(v * clip * clip * static_cast<double>(steps) * std::log(1.0 / delta)) /
         (static_cast<double>(n) * epsilon);
}

double DeltaConvention(std::int64_t n) {
  if (n <= 1) throw std::invalid_argument("delta convention needs N > 1 (delta must be < 1)");
  return std::pow(static_cast<double>(n), -1.1);
}

}  // namespace disk
