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

#include "disk/objectives.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace disk {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double LargestEigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

// (1/N) sum a_i a_i^T
Eigen::MatrixXd SecondMoment(const Dataset& data) {
  const auto p = static_cast<Eigen::Index>(data.feature_dim());
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::Map<const RowMatrix> a(data.features().data(), n, p);
  return (a.transpose() * a) / static_cast<double>(n);
}

double Softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

class Quadratic final : public Objective {
 public:
  Quadratic(std::size_t dim, Vector hessian) : dim_(dim), h_(std::move(hessian)) {
    if (dim_ == 0) throw std::invalid_argument("quadratic: dimension must be >= 1");
    if (h_.size() != dim_ * dim_) throw std::invalid_argument("quadratic: hessian must be d x d");
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(h_[i * dim_ + j] - h_[j * dim_ + i]) > 1e-12 * (1 + std::abs(h_[i * dim_ + j]))) {
          throw std::invalid_argument("quadratic: hessian must be symmetric");
        }
      }
    }
  }

  ObjectiveKind kind() const override { return ObjectiveKind::kQuadratic; }
  std::size_t dim() const override { return dim_; }
  std::size_t feature_dim() const override { return dim_; }

  double Loss(std::span<const double> x, const SampleView& s) const override {
    Vector r = Subtract(x, s.features);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      acc += r[i] * Dot(std::span<const double>(h_).subspan(i * dim_, dim_), r);
    }
    return 0.5 * acc;
  }

  void Gradient(std::span<const double> x, const SampleView& s,
                std::span<double> out) const override {
    Vector r = Subtract(x, s.features);
    for (std::size_t i = 0; i < dim_; ++i) {
      out[i] = Dot(std::span<const double>(h_).subspan(i * dim_, dim_), r);
    }
  }

  bool HasHessianVectorProduct() const override { return true; }
  void HessianVectorProduct(std::span<const double>, const SampleView&, std::span<const double> v,
                            std::span<double> out) const override {
    for (std::size_t i = 0; i < dim_; ++i) {
      out[i] = Dot(std::span<const double>(h_).subspan(i * dim_, dim_), v);
    }
  }

  std::optional<double> Smoothness(const Dataset&) const override {
    Eigen::Map<const RowMatrix> h(h_.data(), static_cast<Eigen::Index>(dim_),
                                  static_cast<Eigen::Index>(dim_));
    return LargestEigenvalue(h);
  }

 private:
  std::size_t dim_;
  Vector h_;
};

class LinearRegression final : public Objective {
 public:
  explicit LinearRegression(std::size_t p) : p_(p) {
    if (p_ == 0) throw std::invalid_argument("linear regression: feature dimension must be >= 1");
  }

  ObjectiveKind kind() const override { return ObjectiveKind::kLinearRegression; }
  std::size_t dim() const override { return p_; }
  std::size_t feature_dim() const override { return p_; }

  double Loss(std::span<const double> x, const SampleView& s) const override {
    const double r = Dot(x, s.features) - s.target;
    return 0.5 * r * r;
  }

  void Gradient(std::span<const double> x, const SampleView& s,
                std::span<double> out) const override {
    const double r = Dot(x, s.features) - s.target;
    for (std::size_t i = 0; i < p_; ++i) out[i] = r * s.features[i];
  }

  bool HasHessianVectorProduct() const override { return true; }
  void HessianVectorProduct(std::span<const double>, const SampleView& s, std::span<const double> v,
                            std::span<double> out) const override {
    const double av = Dot(s.features, v);
    for (std::size_t i = 0; i < p_; ++i) out[i] = av * s.features[i];
  }

  std::optional<double> Smoothness(const Dataset& data) const override {
    return LargestEigenvalue(SecondMoment(data));
  }

 private:
  std::size_t p_;
};

class LogisticRegression final : public Objective {
 public:
  explicit LogisticRegression(std::size_t p) : p_(p) {
    if (p_ == 0) throw std::invalid_argument("logistic regression: feature dimension must be >= 1");
  }

  ObjectiveKind kind() const override { return ObjectiveKind::kLogisticRegression; }
  std::size_t dim() const override { return p_; }
  std::size_t feature_dim() const override { return p_; }

  double Loss(std::span<const double> x, const SampleView& s) const override {
    const double z = Dot(x, s.features);
    return Softplus(z) - s.target * z;
  }

  void Gradient(std::span<const double> x, const SampleView& s,
                std::span<double> out) const override {
    const double r = Sigmoid(Dot(x, s.features)) - s.target;
    for (std::size_t i = 0; i < p_; ++i) out[i] = r * s.features[i];
  }

  bool HasHessianVectorProduct() const override { return true; }
  void HessianVectorProduct(std::span<const double> x, const SampleView& s,
                            std::span<const double> v, std::span<double> out) const override {
    const double sg = Sigmoid(Dot(x, s.features));
    const double w = sg * (1.0 - sg) * Dot(s.features, v);
    for (std::size_t i = 0; i < p_; ++i) out[i] = w * s.features[i];
  }

  // sigma' <= 1/4.
  std::optional<double> Smoothness(const Dataset& data) const override {
    return 0.25 * LargestEigenvalue(SecondMoment(data));
  }

 private:
  std::size_t p_;
};

class Mlp final : public Objective {
 public:
  Mlp(std::size_t p, std::size_t hidden) : p_(p), hidden_(hidden) {
    if (p_ == 0 || hidden_ == 0) throw std::invalid_argument("mlp: dimensions must be >= 1");
    if (dim() > kMaxMlpParams) {
      throw std::invalid_argument("mlp: " + std::to_string(dim()) + " parameters exceeds the cap of " +
                                  std::to_string(kMaxMlpParams));
    }
  }

  ObjectiveKind kind() const override { return ObjectiveKind::kMlp; }
  std::size_t dim() const override { return hidden_ * p_ + 2 * hidden_ + 1; }
  std::size_t feature_dim() const override { return p_; }

  double Loss(std::span<const double> x, const SampleView& s) const override {
    thread_local Vector h;
    const double r = Forward(x, s, h) - s.target;
    return 0.5 * r * r;
  }

  void Gradient(std::span<const double> x, const SampleView& s,
                std::span<double> out) const override {
    thread_local Vector h;
    const double r = Forward(x, s, h) - s.target;
    const std::size_t b1 = hidden_ * p_;
    const std::size_t w2 = b1 + hidden_;
    const std::size_t b2 = w2 + hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) {
      const double delta = r * x[w2 + j] * (1.0 - h[j] * h[j]);
      for (std::size_t k = 0; k < p_; ++k) out[j * p_ + k] = delta * s.features[k];
      out[b1 + j] = delta;
      out[w2 + j] = r * h[j];
    }
    out[b2] = r;
  }

 private:
  double Forward(std::span<const double> x, const SampleView& s, Vector& h) const {
    h.resize(hidden_);
    const std::size_t b1 = hidden_ * p_;
    const std::size_t w2 = b1 + hidden_;
    double out = x[w2 + hidden_];
    for (std::size_t j = 0; j < hidden_; ++j) {
      h[j] = std::tanh(Dot(x.subspan(j * p_, p_), s.features) + x[b1 + j]);
      out += x[w2 + j] * h[j];
    }
    return out;
  }

  std::size_t p_;
  std::size_t hidden_;
};

void CheckParams(const Objective& obj, std::span<const double> x, const char* what) {
  CheckSameSize(x.size(), obj.dim(), what);
}

void CheckSample(const Objective& obj, const SampleView& s, const char* what) {
  CheckSameSize(s.features.size(), obj.feature_dim(), what);
}

}  // namespace

Dataset::Dataset(std::size_t feature_dim, Vector features, Vector targets)
    : feature_dim_(feature_dim), features_(std::move(features)), targets_(std::move(targets)) {
  if (feature_dim_ == 0) throw std::invalid_argument("dataset: feature dimension must be >= 1");
  if (targets_.empty()) throw std::invalid_argument("dataset: needs at least one sample");
  if (features_.size() != targets_.size() * feature_dim_) {
    throw std::invalid_argument("dataset: feature block is not N x p");
  }
  if (!AllFinite(features_) || !AllFinite(targets_)) {
    throw std::invalid_argument("dataset: non-finite entry");
  }
}

void WriteDatasetCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  for (std::size_t k = 0; k < data.feature_dim(); ++k) out << "x_" << (k + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const SampleView s = data.sample(i);
    for (double v : s.features) out << v << ',';
    out << s.target << '\n';
  }
}

Dataset ReadDatasetCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2) throw std::runtime_error(path + ": expected header x_1..x_p,y");
  const std::size_t p = columns - 1;
  Vector features;
  Vector targets;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (col < p) {
        features.push_back(v);
      } else {
        targets.push_back(v);
      }
      ++col;
    }
    if (col != columns) throw std::runtime_error(path + ": ragged row");
  }
  return Dataset(p, std::move(features), std::move(targets));
}

std::string_view ToString(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kQuadratic:
      return "quadratic";
    case ObjectiveKind::kLinearRegression:
      return "linear-regression";
    case ObjectiveKind::kLogisticRegression:
      return "logistic-regression";
    case ObjectiveKind::kMlp:
      return "mlp";
  }
  return "unknown";
}

ObjectiveKind ObjectiveKindFromString(std::string_view name) {
  if (name == "quadratic") return ObjectiveKind::kQuadratic;
  if (name == "linear-regression") return ObjectiveKind::kLinearRegression;
  if (name == "logistic-regression") return ObjectiveKind::kLogisticRegression;
  if (name == "mlp") return ObjectiveKind::kMlp;
  throw std::invalid_argument("unknown objective kind: " + std::string(name));
}

void Objective::HessianVectorProduct(std::span<const double>, const SampleView&,
                                     std::span<const double>, std::span<double>) const {
  throw std::logic_error(std::string(ToString(kind())) + ": no exact Hessian-vector product");
}

std::unique_ptr<Objective> MakeQuadratic(std::size_t dim, Vector hessian) {
  return std::make_unique<Quadratic>(dim, std::move(hessian));
}
std::unique_ptr<Objective> MakeLinearRegression(std::size_t feature_dim) {
  return std::make_unique<LinearRegression>(feature_dim);
}
std::unique_ptr<Objective> MakeLogisticRegression(std::size_t feature_dim) {
  return std::make_unique<LogisticRegression>(feature_dim);
}
std::unique_ptr<Objective> MakeMlp(std::size_t feature_dim, std::size_t hidden) {
  return std::make_unique<Mlp>(feature_dim, hidden);
}

Vector PerSampleGrad(const Objective& obj, std::span<const double> x, const SampleView& sample) {
  CheckParams(obj, x, "per_sample_grad");
  CheckSample(obj, sample, "per_sample_grad");
  Vector g(obj.dim());
  obj.Gradient(x, sample, g);
  return g;
}

double LookaheadCoefficient(double kappa, double gamma) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (gamma == 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and non-zero");
  const long double k = kappa;
  return static_cast<double>((1.0L - k) / (k * static_cast<long double>(gamma)));
}

Vector TwoPointPerSampleGrad(const Objective& obj, std::span<const double> x,
                             std::span<const double> d_prev, double gamma, double kappa,
                             const SampleView& sample) {
  CheckParams(obj, x, "two_point_per_sample_grad");
  CheckSameSize(d_prev.size(), obj.dim(), "two_point_per_sample_grad");
  CheckSample(obj, sample, "two_point_per_sample_grad");
  const double a = LookaheadCoefficient(kappa, gamma);
  Vector g(obj.dim());
  obj.Gradient(x, sample, g);
  if (a == 0.0) return g;
  Vector shifted(x.begin(), x.end());
  Axpy(gamma, d_prev, shifted);
  Vector g_shift(obj.dim());
  obj.Gradient(shifted, sample, g_shift);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = a * g_shift[i] + (1.0 - a) * g[i];
  return g;
}

Vector FullGradient(const Objective& obj, std::span<const double> x, const Dataset& data) {
  CheckParams(obj, x, "full_gradient");
  CheckSameSize(data.feature_dim(), obj.feature_dim(), "full_gradient");
  if (data.size() == 0) throw std::invalid_argument("full_gradient: empty dataset");
  Vector sum(obj.dim(), 0.0);
  Vector g(obj.dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    obj.Gradient(x, data.sample(i), g);
    for (std::size_t k = 0; k < g.size(); ++k) sum[k] += g[k];
  }
  Scale(1.0 / static_cast<double>(data.size()), sum);
  return sum;
}

double FullLoss(const Objective& obj, std::span<const double> x, const Dataset& data) {
  CheckParams(obj, x, "full_loss");
  CheckSameSize(data.feature_dim(), obj.feature_dim(), "full_loss");
  if (data.size() == 0) throw std::invalid_argument("full_loss: empty dataset");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) sum += obj.Loss(x, data.sample(i));
  return sum / static_cast<double>(data.size());
}

OptimumEstimate EstimateOptimum(const Objective& obj, const Dataset& data,
                                std::size_t estimate_steps) {
  OptimumEstimate result;
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p = static_cast<Eigen::Index>(data.feature_dim());
  switch (obj.kind()) {
    case ObjectiveKind::kQuadratic: {
      // grad F = H (x - mean c); the mean centre is a minimiser.
      Vector c(obj.dim(), 0.0);
      for (std::size_t i = 0; i < data.size(); ++i) Axpy(1.0, data.sample(i).features, c);
      Scale(1.0 / static_cast<double>(data.size()), c);
      result.minimizer = std::move(c);
      result.exact = true;
      break;
    }
    case ObjectiveKind::kLinearRegression: {
      Eigen::Map<const RowMatrix> a(data.features().data(), n, p);
      Eigen::Map<const Eigen::VectorXd> y(data.targets().data(), n);
      Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(y);
      result.minimizer.assign(sol.data(), sol.data() + sol.size());
      result.exact = true;
      break;
    }
    default: {
      const std::optional<double> l = obj.Smoothness(data);
      const double lr = l ? 1.0 / *l : 0.05;
      Vector x(obj.dim(), 0.0);
      for (std::size_t t = 0; t < estimate_steps; ++t) Axpy(-lr, FullGradient(obj, x, data), x);
      result.minimizer = std::move(x);
      result.exact = false;
      break;
    }
  }
  result.value = FullLoss(obj, result.minimizer, data);
  return result;
}

SyntheticProblem GenLinearRegression(std::size_t n, std::size_t p, double noise_std,
                                     std::uint64_t seed) {
  if (n == 0 || p == 0) throw std::invalid_argument("gen_linear_regression: n and p must be >= 1");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("gen_linear_regression: noise_std must be >= 0");
  Rng rng = MakeStream(seed, kDataStream);
  std::normal_distribution<double> normal;
  Vector theta(p);
  for (double& v : theta) v = normal(rng);
  Vector features(n * p);
  Vector targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) features[i * p + k] = normal(rng);
    const double clean = Dot(std::span<const double>(features).subspan(i * p, p), theta);
    const double z = normal(rng);
    targets[i] = noise_std == 0.0 ? clean : clean + noise_std * z;
  }
  return {Dataset(p, std::move(features), std::move(targets)), std::move(theta)};
}

SyntheticProblem GenLogisticRegression(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n == 0 || p == 0) throw std::invalid_argument("gen_logistic_regression: n and p must be >= 1");
  Rng rng = MakeStream(seed, kDataStream);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector theta(p);
  for (double& v : theta) v = normal(rng);
  Vector features(n * p);
  Vector targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) features[i * p + k] = normal(rng);
    const double z = Dot(std::span<const double>(features).subspan(i * p, p), theta);
    targets[i] = uniform(rng) < Sigmoid(z) ? 1.0 : 0.0;
  }
  return {Dataset(p, std::move(features), std::move(targets)), std::move(theta)};
}

SyntheticProblem GenQuadraticCenters(std::size_t n, std::size_t d, double center_std,
                                     std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("gen_quadratic: n and d must be >= 1");
  Rng rng = MakeStream(seed, kDataStream);
  std::normal_distribution<double> normal;
  Vector centers(n * d, 0.0);
  if (center_std > 0.0) {
    for (double& v : centers) v = center_std * normal(rng);
  }
  return {Dataset(d, std::move(centers), Vector(n, 0.0)), {}};
}

Vector RandomSpdMatrix(std::span<const double> eigenvalues, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(eigenvalues.size());
  if (d == 0) throw std::invalid_argument("random_spd: need at least one eigenvalue");
  Rng rng = MakeStream(seed, "spd_rotation");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), d);
  Eigen::MatrixXd h = q * lam.asDiagonal() * q.transpose();
  h = 0.5 * (h + h.transpose());
  Vector out(static_cast<std::size_t>(d * d));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out[static_cast<std::size_t>(i * d + j)] = h(i, j);
  }
  return out;
}

}  // namespace disk
