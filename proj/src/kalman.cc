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

#include "disk/kalman.h"

#include <cmath>
#include <sstream>
#include <string>

#include "disk/rng.h"

namespace disk {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kPsdTolerance = 1e-10;

void CheckSquare(const Eigen::MatrixXd& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << what << ": expected " << n << "x" << n << ", got " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(os.str());
  }
}

void CheckCovariance(const Eigen::MatrixXd& m, const char* what) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(what) + " is not symmetric");
  }
  if (MinEigenvalue(m) < -kPsdTolerance * scale) {
    throw std::invalid_argument(std::string(what) + " is not positive semi-definite");
  }
}

// Solves X S = B for symmetric positive definite S with a conditioning check,
// i.e. returns B S^{-1}.
Eigen::MatrixXd RightSolveSpd(const Eigen::MatrixXd& b, Eigen::MatrixXd s, const char* what) {
  Symmetrize(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << what << " is not positive definite (smallest eigenvalue " << lo << ")";
    throw FilterConditioningError(os.str());
  }
  if (hi / lo > kMaxCondition) {
    std::ostringstream os;
    os << what << " is numerically singular (condition number " << hi / lo << " > 1e12)";
    throw FilterConditioningError(os.str());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  return llt.solve(b.transpose()).transpose();
}

// Symmetric square root used to colour white noise.
Eigen::MatrixXd NoiseFactor(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

Eigen::VectorXd StandardNormal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

Eigen::MatrixXd RandomSpd(Eigen::Index n, double scale, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::MatrixXd m = scale * (g * g.transpose() / static_cast<double>(n) +
                               0.5 * Eigen::MatrixXd::Identity(n, n));
  Symmetrize(m);
  return m;
}

}  // namespace

void Symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

double MinEigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

void LinearSystem::Validate() const {
  const Eigen::Index n = transition.rows();
  if (n == 0) throw std::invalid_argument("linear system: empty state");
  if (n > kMaxFilterDim || observation.rows() > kMaxFilterDim) {
    throw std::invalid_argument("linear system: full-matrix filter is capped at dimension 64");
  }
  CheckSquare(transition, n, "transition");
  if (observation.cols() != n || observation.rows() == 0) {
    throw std::invalid_argument("observation matrix must have one column per state");
  }
  CheckSquare(process_noise, n, "process noise");
  CheckSquare(observation_noise, observation.rows(), "observation noise");
  CheckCovariance(process_noise, "process noise covariance");
  CheckCovariance(observation_noise, "observation noise covariance");
}

KalmanState KfPredict(const KalmanState& state, const LinearSystem& sys,
                      const Eigen::VectorXd& input) {
  const Eigen::Index n = sys.state_dim();
  if (state.estimate.size() != n || input.size() != n) {
    throw std::invalid_argument("kf_predict: dimension mismatch");
  }
  CheckSquare(state.covariance, n, "covariance");
  KalmanState out;
  out.estimate = sys.transition * state.estimate + input;
  out.covariance = sys.transition * state.covariance * sys.transition.transpose() + sys.process_noise;
  Symmetrize(out.covariance);
  out.gain = state.gain;
  return out;
}

KalmanState KfCorrect(const KalmanState& state, const LinearSystem& sys,
                      const Eigen::VectorXd& observation) {
  const Eigen::Index n = sys.state_dim();
  if (state.estimate.size() != n || observation.size() != sys.obs_dim()) {
    throw std::invalid_argument("kf_correct: dimension mismatch");
  }
  CheckSquare(state.covariance, n, "covariance");
  const Eigen::MatrixXd& c = sys.observation;
  const Eigen::MatrixXd pct = state.covariance * c.transpose();
  const Eigen::MatrixXd innovation = c * pct + sys.observation_noise;
  KalmanState out;
  out.gain = RightSolveSpd(pct, innovation, "innovation covariance");
  const Eigen::MatrixXd i_kc = Eigen::MatrixXd::Identity(n, n) - out.gain * c;
  out.estimate = i_kc * state.estimate + out.gain * observation;
  out.covariance = i_kc * state.covariance;
  Symmetrize(out.covariance);
  return out;
}

Eigen::MatrixXd KfGainAlg2(const Eigen::MatrixXd& p_pred, const Eigen::MatrixXd& expected_obs,
                           const Eigen::MatrixXd& sigma_c_term, double sigma_w2,
                           const Eigen::MatrixXd& sigma_h) {
  const Eigen::Index d = p_pred.rows();
  if (d > kMaxFilterDim) throw std::invalid_argument("kf_gain: dimension capped at 64");
  CheckSquare(p_pred, d, "P");
  CheckSquare(expected_obs, d, "E[C]");
  CheckSquare(sigma_c_term, d, "Sigma_C term");
  CheckSquare(sigma_h, d, "Sigma_H");
  if (!(sigma_w2 >= 0.0)) throw std::invalid_argument("sigma_w^2 must be >= 0");
  const Eigen::MatrixXd bracket = expected_obs * (p_pred + sigma_c_term) * expected_obs.transpose() +
                                  sigma_w2 * Eigen::MatrixXd::Identity(d, d) - sigma_h;
  return RightSolveSpd(p_pred * expected_obs.transpose(), bracket, "gain bracket");
}

ScalarGainState ScalarGainStep(const ScalarGainState& s) {
  if (s.sigma_h2 < 0.0 || s.sigma_v2 < 0.0 || s.sigma_w2 < 0.0 || s.p < 0.0) {
    throw std::invalid_argument("scalar gain: noise levels and p must be >= 0");
  }
  if (s.sigma_w2 < s.sigma_h2) {
    throw std::invalid_argument("scalar gain: needs sigma_w^2 >= sigma_H^2 (p would turn negative)");
  }
  const double denom = s.p + s.sigma_w2 + s.sigma_v2;
  if (!(denom > 0.0)) throw std::invalid_argument("scalar gain: p + sigma_w^2 + sigma_v^2 must be > 0");
  ScalarGainState next = s;
  next.k = (s.p + s.sigma_h2 + s.sigma_v2) / denom;
  next.p = (s.sigma_w2 - s.sigma_h2) * next.k;
  return next;
}

ScalarFixedPoint ComputeScalarFixedPoint(double sigma_h2, double sigma_v2, double sigma_w2) {
  if (sigma_h2 < 0.0 || sigma_v2 < 0.0 || sigma_w2 < 0.0) {
    throw std::invalid_argument("scalar fixed point: noise levels must be >= 0");
  }
  const double hv = sigma_h2 + sigma_v2;
  const double gap = sigma_w2 - sigma_h2;
  const double spread = 4.0 * sigma_w2 - 3.0 * sigma_h2 + sigma_v2;
  if (spread < 0.0) throw std::invalid_argument("scalar fixed point: 4 sW - 3 sH + sV must be >= 0");
  const double root = std::sqrt(hv) * std::sqrt(spread);
  ScalarFixedPoint fp;
  // (root - hv) / 2 rewritten without the cancellation: root^2 - hv^2 = 4 hv gap.
  fp.p_inf = hv > 0.0 ? 2.0 * hv * gap / (root + hv) : 0.0;
  const double denom = fp.p_inf + sigma_w2 + sigma_v2;
  fp.k_inf = denom > 0.0 ? (fp.p_inf + hv) / denom : 1.0;
  const double outer = 2.0 * gap + hv + root;
  fp.c_k = outer > 0.0 ? 4.0 * gap * gap / (outer * outer) : 0.0;
  const double base = 2.0 * sigma_w2 + 3.0 * sigma_h2 + sigma_v2;
  fp.c_k_quoted = (base - root) / (base + root);
  return fp;
}

LinearSystem RandomStableSystem(Eigen::Index state_dim, std::uint64_t seed) {
  Rng rng = MakeStream(seed, "linear_system");
  std::normal_distribution<double> normal;
  LinearSystem sys;
  Eigen::MatrixXd a(state_dim, state_dim);
  for (Eigen::Index j = 0; j < state_dim; ++j) {
    for (Eigen::Index i = 0; i < state_dim; ++i) a(i, j) = normal(rng);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  sys.transition = a * (0.9 / radius);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(state_dim, state_dim);
  for (Eigen::Index j = 0; j < state_dim; ++j) {
    for (Eigen::Index i = 0; i < state_dim; ++i) c(i, j) += 0.3 * normal(rng);
  }
  sys.observation = c;
  sys.process_noise = RandomSpd(state_dim, 0.1, rng);
  sys.observation_noise = RandomSpd(state_dim, 1.0, rng);
  return sys;
}

std::vector<BlueRun> RunBlueSimulation(const LinearSystem& sys, int runs, int steps,
                                       std::uint64_t seed) {
  sys.Validate();
  const Eigen::Index n = sys.state_dim();
  const Eigen::MatrixXd pinv_c = sys.observation.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd v_factor = NoiseFactor(sys.process_noise);
  const Eigen::MatrixXd w_factor = NoiseFactor(sys.observation_noise);
  const Eigen::VectorXd zero_input = Eigen::VectorXd::Zero(n);

  std::vector<BlueRun> out;
  out.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    Rng rng = MakeStream(seed, "blue_run_" + std::to_string(r));
    Eigen::VectorXd truth = StandardNormal(n, rng);
    KalmanState kf{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n), {}};
    BlueRun result;
    result.run = r;
    result.min_covariance_eigenvalue = MinEigenvalue(kf.covariance);
    double raw_sq = 0.0;
    double kf_sq = 0.0;
    for (int t = 0; t < steps; ++t) {
      truth = sys.transition * truth + v_factor * StandardNormal(n, rng);
      const Eigen::VectorXd obs =
          sys.observation * truth + w_factor * StandardNormal(sys.obs_dim(), rng);
      kf = KfCorrect(KfPredict(kf, sys, zero_input), sys, obs);
      result.min_covariance_eigenvalue =
          std::min(result.min_covariance_eigenvalue, MinEigenvalue(kf.covariance));
      raw_sq += (pinv_c * obs - truth).squaredNorm();
      kf_sq += (kf.estimate - truth).squaredNorm();
    }
    const double denom = static_cast<double>(steps) * static_cast<double>(n);
    result.mse_raw = raw_sq / denom;
    result.mse_kf = kf_sq / denom;
    out.push_back(result);
  }
  return out;
}

}  // namespace disk
