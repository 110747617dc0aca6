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

#ifndef DISK_KALMAN_H_
#define DISK_KALMAN_H_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace disk {

// Full-matrix filters are limited to demonstration scale.
inline constexpr Eigen::Index kMaxFilterDim = 64;

class FilterConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//   theta_t = A theta_{t-1} + u_t + v_t,   v_t ~ N(0, Sigma_v)
//   psi_t   = C theta_t + w_t,             w_t ~ N(0, Sigma_w)
struct LinearSystem {
  Eigen::MatrixXd transition;         // A
  Eigen::MatrixXd observation;        // C
  Eigen::MatrixXd process_noise;      // Sigma_v
  Eigen::MatrixXd observation_noise;  // Sigma_w

  Eigen::Index state_dim() const { return transition.rows(); }
  Eigen::Index obs_dim() const { return observation.rows(); }

  // Shapes, symmetry, PSD-ness of both covariances, and the dimension cap.
  void Validate() const;
};

struct KalmanState {
  Eigen::VectorXd estimate;    // theta~
  Eigen::MatrixXd covariance;  // P
  Eigen::MatrixXd gain;        // last K (empty before the first correction)
};

// theta~ <- A theta~ + u,  P <- A P A^T + Sigma_v.
KalmanState KfPredict(const KalmanState& state, const LinearSystem& sys,
                      const Eigen::VectorXd& input);

// K = P C^T (C P C^T + Sigma_w)^{-1}; theta~ <- (I - K C) theta~ + K psi;
// P <- (I - K C) P, symmetrised. Throws FilterConditioningError when the
// innovation covariance is not positive definite or its condition number
// exceeds 1e12.
KalmanState KfCorrect(const KalmanState& state, const LinearSystem& sys,
                      const Eigen::VectorXd& observation);

// Gain of the filter with noisy input and multiplicative observation noise:
//   K = P E_C^T (E_C (P + S) E_C^T + sigma_w^2 I - Sigma_H)^{-1}
// where S stands for Sigma_C S_t. Throws FilterConditioningError naming the
// smallest eigenvalue when the bracket is not positive definite.
Eigen::MatrixXd KfGainAlg2(const Eigen::MatrixXd& p_pred, const Eigen::MatrixXd& expected_obs,
                           const Eigen::MatrixXd& sigma_c_term, double sigma_w2,
                           const Eigen::MatrixXd& sigma_h);

// (P + P^T) / 2 in place.
void Symmetrize(Eigen::MatrixXd& m);
double MinEigenvalue(const Eigen::MatrixXd& symmetric);

// Scalar gain recursion obtained when every covariance is a multiple of I.
struct ScalarGainState {
  double p = 0.0;
  double k = 1.0;
  double sigma_h2 = 0.0;
  double sigma_v2 = 0.0;
  double sigma_w2 = 0.0;
};

// k' = (p + sH + sV) / (p + sW + sV), p' = (sW - sH) k'.
// Requires sigma_w2 >= sigma_h2.
ScalarGainState ScalarGainStep(const ScalarGainState& s);

struct ScalarFixedPoint {
  double p_inf = 0.0;
  double k_inf = 0.0;
  // Contraction factor of k_t near k_inf: the derivative of the p recursion
  // at its fixed point, 4 s^2 / (2 s + a + R)^2 with s = sW - sH, a = sH + sV,
  // R = sqrt(a (a + 4 s)).
  double c_k = 0.0;
  // The commonly quoted closed form (base - R) / (base + R) with
  // base = 2 sW + 3 sH + sV. Equal to c_k only when sH = 0.
  double c_k_quoted = 0.0;
};

ScalarFixedPoint ComputeScalarFixedPoint(double sigma_h2, double sigma_v2, double sigma_w2);

// --- BLUE sanity simulation -------------------------------------------------

struct BlueRun {
  int run = 0;
  double mse_raw = 0.0;  // pseudo-inverse of C applied to each observation
  double mse_kf = 0.0;
  double min_covariance_eigenvalue = 0.0;
};

// A random stable system of dimension `state_dim` (spectral radius 0.9) with
// a full-rank observation matrix, fixed by `seed`.
LinearSystem RandomStableSystem(Eigen::Index state_dim, std::uint64_t seed);

// Simulates `runs` independent trajectories of `steps` steps and compares the
// filter's MSE against the raw inverted observations.
std::vector<BlueRun> RunBlueSimulation(const LinearSystem& sys, int runs, int steps,
                                       std::uint64_t seed);

}  // namespace disk

#endif  // DISK_KALMAN_H_
