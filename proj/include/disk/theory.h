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

#ifndef DISK_THEORY_H_
#define DISK_THEORY_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace disk {

// Problem-level constants of the smooth, bounded-variance setting.
struct ProblemConstants {
  double smoothness = 1.0;       // L
  double f0_minus_fstar = 0.0;   // F(x_0) - F*
  double grad0_norm_sq = 0.0;    // |grad F(x_0)|^2
  double sigma_sgd2 = 0.0;       // per-sample gradient variance bound
  double grad_bound = 0.0;       // G, per-sample gradient norm bound
  double dim = 1.0;              // d

  void Validate() const;
};

struct TheoryConstants {
  double m_gamma = 0.0;
  double m1 = 0.0;
  double beta = 0.0;  // smallest admissible value
  // 1 + 4 eta^2 L^2 + |1 + gamma| (kappa + 2 eta^2 L^2 M_gamma); shows up in
  // both the beta denominator and the kappa condition.
  double q = 0.0;
};

class KappaTooSmallError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws KappaTooSmallError when 1 - (1 - kappa)^2 q <= 0.
TheoryConstants ComputeConstants(double eta, double kappa, double gamma, double smoothness);

// The step-size and clipping conditions exist in two versions that disagree;
// both are reported and the stricter one decides `valid`.
struct ParameterReport {
  TheoryConstants constants;
  double eta_limit_statement = 0.0;  // (1 + kappa) / (2L(1 + 2(1-kappa)^2 beta L (2 + |1+gamma| M_gamma)))
  double eta_limit_proof = 0.0;      // same with numerator 1
  bool eta_ok_statement = false;
  bool eta_ok_proof = false;
  double clip_threshold_lemma = 0.0;  // (1 + 2(1 - kappa)/kappa) G
  double clip_threshold_proof = 0.0;  // G (1 + 2(1 - kappa)/(kappa gamma))
  bool clip_ok_lemma = false;
  bool clip_ok_proof = false;
  bool kappa_ok = false;
  bool m1_positive = false;
  double coefficient_checks[3] = {0.0, 0.0, 0.0};  // the three coefficient inequalities
  bool coefficients_ok = false;
  bool valid = false;
  std::vector<std::string> failures;
};

ParameterReport ValidateParameters(double eta, double kappa, double gamma, double clip,
                                   const ProblemConstants& pc);

// |grad F(x_0)|^2 / (2 L (F(x_0) - F*)).
double MKappa(const ProblemConstants& pc);

struct Corollary1Params {
  double eta = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
  double m_kappa = 0.0;
  double batch_min = 1.0;
  double steps_min = 0.0;
  bool steps_below_min = false;
};

// Step size, kappa, beta, minimum batch and horizon for gamma = -1.
Corollary1Params ComputeCorollary1Params(const ProblemConstants& pc, double sigma_dp,
                                         std::int64_t steps);

struct Theorem2Bound {
  double optimization_term = 0.0;
  double noise_term = 0.0;
  double total = 0.0;
};

Theorem2Bound Thm2Rhs(const ProblemConstants& pc, double eta, double kappa, double gamma,
                      double sigma_dp, std::int64_t steps, double batch_size);

// 8 sqrt(M_kappa L (F0 - F*) d sigma^2 / T).
double Cor1Rhs(const ProblemConstants& pc, double sigma_dp, std::int64_t steps);

struct Theorem3Bound {
  double bound = 0.0;
  double steps = 0.0;  // prescribed horizon, not rounded
};

Theorem3Bound Thm3Rhs(const ProblemConstants& pc, double n, double epsilon, double delta,
                      double clip);

}  // namespace disk

#endif  // DISK_THEORY_H_
