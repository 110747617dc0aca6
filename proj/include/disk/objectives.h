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

#ifndef DISK_OBJECTIVES_H_
#define DISK_OBJECTIVES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "disk/rng.h"
#include "disk/vector_ops.h"

namespace disk {

// One training example: a feature vector and a scalar target.
struct SampleView {
  std::span<const double> features;
  double target = 0.0;
};

// N samples of dimension p stored row-major.
class Dataset {
 public:
  Dataset() = default;
  // Validates shape (N >= 1, p >= 1, rows * p == features.size()) and finiteness.
  Dataset(std::size_t feature_dim, Vector features, Vector targets);

  std::size_t size() const { return targets_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }
  SampleView sample(std::size_t i) const {
    return {std::span<const double>(features_).subspan(i * feature_dim_, feature_dim_),
            targets_[i]};
  }
  const Vector& features() const { return features_; }
  const Vector& targets() const { return targets_; }

 private:
  std::size_t feature_dim_ = 0;
  Vector features_;
  Vector targets_;
};

// CSV with header x_1..x_p,y. Values are written with round-trip precision.
void WriteDatasetCsv(const Dataset& data, const std::string& path);
Dataset ReadDatasetCsv(const std::string& path);

enum class ObjectiveKind { kQuadratic, kLinearRegression, kLogisticRegression, kMlp };

std::string_view ToString(ObjectiveKind kind);
ObjectiveKind ObjectiveKindFromString(std::string_view name);

// A per-sample differentiable loss f(x; xi). Gradients are hand-derived.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual ObjectiveKind kind() const = 0;
  // Parameter dimension d.
  virtual std::size_t dim() const = 0;
  // Feature dimension p the objective expects from samples.
  virtual std::size_t feature_dim() const = 0;

  virtual double Loss(std::span<const double> x, const SampleView& sample) const = 0;
  // Writes grad f(x; sample) into `out` (size d). No dimension checks here;
  // callers on the hot path validate once per batch.
  virtual void Gradient(std::span<const double> x, const SampleView& sample,
                        std::span<double> out) const = 0;

  // Exact per-sample Hessian-vector product when available.
  virtual bool HasHessianVectorProduct() const { return false; }
  virtual void HessianVectorProduct(std::span<const double> x, const SampleView& sample,
                                    std::span<const double> v, std::span<double> out) const;

  // Smoothness constant of F on `data`, when it can be computed.
  virtual std::optional<double> Smoothness(const Dataset& data) const {
    (void)data;
    return std::nullopt;
  }
};

// f(x; c) = 1/2 (x - c)^T H (x - c); samples carry the centre c (p = d).
// `hessian` is d x d row-major, symmetric positive semi-definite.
std::unique_ptr<Objective> MakeQuadratic(std::size_t dim, Vector hessian);
// f(x; a, y) = 1/2 (<x, a> - y)^2.
std::unique_ptr<Objective> MakeLinearRegression(std::size_t feature_dim);
// f(x; a, y) = log(1 + exp(<x, a>)) - y <x, a>, labels y in {0, 1}.
std::unique_ptr<Objective> MakeLogisticRegression(std::size_t feature_dim);
// One tanh hidden layer, scalar output, squared loss 1/2 (out - y)^2.
// Parameter layout: W1 (hidden x p), b1 (hidden), w2 (hidden), b2.
std::unique_ptr<Objective> MakeMlp(std::size_t feature_dim, std::size_t hidden = 16);

inline constexpr std::size_t kMaxMlpParams = 2000;

// Checked single-sample gradient.
Vector PerSampleGrad(const Objective& obj, std::span<const double> x, const SampleView& sample);

// a * grad f(x + gamma d_prev; xi) + (1 - a) * grad f(x; xi), a = (1 - kappa) / (kappa gamma).
Vector TwoPointPerSampleGrad(const Objective& obj, std::span<const double> x,
                             std::span<const double> d_prev, double gamma, double kappa,
                             const SampleView& sample);

// The look-ahead coefficient a = (1 - kappa) / (kappa gamma), evaluated in long
// double. Throws on gamma == 0 or kappa outside (0, 1].
double LookaheadCoefficient(double kappa, double gamma);

// Means over the whole dataset, accumulated in index order.
Vector FullGradient(const Objective& obj, std::span<const double> x, const Dataset& data);
double FullLoss(const Objective& obj, std::span<const double> x, const Dataset& data);

// Minimum of F where it has a closed form (quadratic, linear regression).
// Otherwise runs 1e5 full-batch steps of size 1/L and reports an estimate.
struct OptimumEstimate {
  double value = 0.0;
  Vector minimizer;
  bool exact = false;
};
OptimumEstimate EstimateOptimum(const Objective& obj, const Dataset& data,
                                std::size_t estimate_steps = 100000);

// --- synthetic data -------------------------------------------------------

struct SyntheticProblem {
  Dataset data;
  Vector truth;  // theta* (regression) or unused for quadratics.
};

// y_i = <x_i, theta*> + noise_std z_i with x_i, z_i, theta* standard normal.
SyntheticProblem GenLinearRegression(std::size_t n, std::size_t p, double noise_std,
                                     std::uint64_t seed);
// Labels drawn as Bernoulli(sigmoid(<x_i, theta*>)).
SyntheticProblem GenLogisticRegression(std::size_t n, std::size_t p, std::uint64_t seed);
// n centres c_i = center_std * z_i (all zero when center_std == 0).
SyntheticProblem GenQuadraticCenters(std::size_t n, std::size_t d, double center_std,
                                     std::uint64_t seed);
// Random rotation of diag(eigenvalues); row-major d x d.
Vector RandomSpdMatrix(std::span<const double> eigenvalues, std::uint64_t seed);

// --- sampling -------------------------------------------------------------

// Fixed-size minibatches drawn without replacement: each epoch is a fresh
// permutation cut into floor(N / B) batches; the remainder is dropped.
class MinibatchSampler {
 public:
  MinibatchSampler(std::size_t dataset_size, std::size_t batch_size, std::uint64_t seed);

  std::span<const std::size_t> Next();

  std::size_t batch_size() const { return batch_size_; }
  std::size_t batches_per_epoch() const { return dataset_size_ / batch_size_; }
  double sampling_rate() const {
    return static_cast<double>(batch_size_) / static_cast<double>(dataset_size_);
  }

 private:
  void Reshuffle();

  std::size_t dataset_size_;
  std::size_t batch_size_;
  Rng rng_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> permutation_;
};

}  // namespace disk

#endif  // DISK_OBJECTIVES_H_
