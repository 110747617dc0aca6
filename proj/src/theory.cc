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

#include "disk/theory.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace disk {

void ProblemConstants::Validate() const {
  if (!(smoothness > 0.0)) throw std::invalid_argument("L must be > 0");
  if (!(f0_minus_fstar >= 0.0 && grad0_norm_sq >= 0.0 && sigma_sgd2 >= 0.0 && grad_bound >= 0.0)) {
    throw std::invalid_argument("problem constants must be >= 0");
  }
  if (!(dim >= 1.0)) throw std::invalid_argument("dimension must be >= 1");
}

TheoryConstants ComputeConstants(double eta, double kappa, double gamma, double smoothness) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must be in (0, 1]");
  if (gamma == 0.0) throw std::invalid_argument("gamma must be != 0");
  if (!(smoothness > 0.0)) throw std::invalid_argument("L must be > 0");
  const double l = smoothness;
  const double shift = std::abs(1.0 + gamma);
  const double keep2 = (1.0 - kappa) * (1.0 - kappa);
  const double el2 = eta * eta * l * l;

  TheoryConstants c;
  c.m_gamma = 1.0 + 4.0 * (2.0 + 1.0 / kappa + shift) / (gamma * gamma);
  c.q = 1.0 + 4.0 * el2 + shift * (kappa + 2.0 * el2 * c.m_gamma);
  const double denom = 1.0 - keep2 * c.q;
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "kappa too small for this eta: 1 - (1 - kappa)^2 q = " << denom << " <= 0 (kappa = "
       << kappa << ", eta = " << eta << ", gamma = " << gamma << ")";
    throw KappaTooSmallError(os.str());
  }
  c.beta = (eta * (1.0 - kappa) / 2.0 + eta * eta * l * keep2 * c.q) / denom;
  c.m1 = (1.0 + kappa - 2.0 * eta * l) -
         4.0 * (c.beta + eta * eta * l) * keep2 * l * l * eta * (2.0 + shift * c.m_gamma);
  return c;
}

ParameterReport ValidateParameters(double eta, double kappa, double gamma, double clip,
                                   const ProblemConstants& pc) {
  pc.Validate();
  ParameterReport r;
  const double l = pc.smoothness;
  const double shift = std::abs(1.0 + gamma);
  const double keep2 = (1.0 - kappa) * (1.0 - kappa);
  try {
    r.constants = ComputeConstants(eta, kappa, gamma, l);
    r.kappa_ok = true;
  } catch (const KappaTooSmallError& e) {
    r.failures.push_back(e.what());
    r.clip_threshold_lemma = (1.0 + 2.0 * (1.0 - kappa) / kappa) * pc.grad_bound;
    r.clip_threshold_proof = pc.grad_bound * (1.0 + 2.0 * (1.0 - kappa) / (kappa * gamma));
    return r;
  }
  const TheoryConstants& c = r.constants;

  const double eta_denom = 2.0 * l * (1.0 + 2.0 * keep2 * c.beta * l * (2.0 + shift * c.m_gamma));
  r.eta_limit_statement = (1.0 + kappa) / eta_denom;
  r.eta_limit_proof = 1.0 / eta_denom;
  r.eta_ok_statement = eta < r.eta_limit_statement;
  r.eta_ok_proof = eta < r.eta_limit_proof;

  r.clip_threshold_lemma = (1.0 + 2.0 * (1.0 - kappa) / kappa) * pc.grad_bound;
  r.clip_threshold_proof = pc.grad_bound * (1.0 + 2.0 * (1.0 - kappa) / (kappa * gamma));
  r.clip_ok_lemma = clip >= r.clip_threshold_lemma;
  r.clip_ok_proof = clip >= r.clip_threshold_proof;

  r.m1_positive = c.m1 > 0.0;
  r.coefficient_checks[0] = eta * (1.0 + kappa - 2.0 * eta * l) / 2.0 -
                            2.0 * (c.beta + eta * eta * l) * keep2 * l * l * eta * eta *
                                (2.0 + shift * c.m_gamma);
  r.coefficient_checks[1] = 1.0 - keep2 * c.q;
  r.coefficient_checks[2] = c.beta - eta * (1.0 - kappa) / 2.0 - (c.beta + eta * eta * l) * keep2 * c.q;
  // The third holds with equality at the smallest beta; allow rounding.
  const double slack = 1e-12 * std::max(1.0, std::abs(c.beta));
  r.coefficients_ok = r.coefficient_checks[0] > 0.0 && r.coefficient_checks[1] > 0.0 &&
                      r.coefficient_checks[2] >= -slack;

  if (!r.eta_ok_proof) {
    std::ostringstream os;
    os << "eta = " << eta << " violates eta < " << r.eta_limit_proof
       << " (the looser limit is " << r.eta_limit_statement << ")";
    r.failures.push_back(os.str());
  }
  if (!r.clip_ok_lemma || !r.clip_ok_proof) {
    std::ostringstream os;
    os << "C = " << clip << " is below max(" << r.clip_threshold_lemma << ", "
       << r.clip_threshold_proof << ")";
    r.failures.push_back(os.str());
  }
  if (!r.m1_positive) r.failures.push_back("M_1 <= 0");
  if (!r.coefficients_ok) r.failures.push_back("coefficient inequalities do not hold");
  r.valid = r.failures.empty();
  return r;
}

double MKappa(const ProblemConstants& pc) {
  pc.Validate();
  if (!(pc.f0_minus_fstar > 0.0)) throw std::invalid_argument("M_kappa needs F(x_0) - F* > 0");
  return pc.grad0_norm_sq / (2.0 * pc.smoothness * pc.f0_minus_fstar);
}

Corollary1Params ComputeCorollary1Params(const ProblemConstants& pc, double sigma_dp,
                                         std::int64_t steps) {
  if (!(sigma_dp > 0.0)) throw std::invalid_argument("corollary parameters need sigma_dp > 0");
  if (steps < 1) throw std::invalid_argument("T must be >= 1");
  Corollary1Params p;
  const double l = pc.smoothness;
  const double gap = pc.f0_minus_fstar;
  const double m = MKappa(pc);
  if (!(m > 0.0)) throw std::invalid_argument("M_kappa must be > 0 (zero initial gradient)");
  const double s2 = sigma_dp * sigma_dp;
  const double t = static_cast<double>(steps);
  p.m_kappa = m;
  p.eta = std::min(1.0 / (l * (2.0 + 4.0 / m - m)),
                   std::sqrt((2.0 * m * l * gap + pc.grad0_norm_sq) / (2.0 * t * pc.dim * s2)) / (m * l));
  p.kappa = m * l * p.eta;
  const double keep2 = (1.0 - p.kappa) * (1.0 - p.kappa);
  const double q = 1.0 + 4.0 * p.eta * p.eta * l * l;
  p.beta = (p.eta * (1.0 - p.kappa) / 2.0 + p.eta * p.eta * l * keep2 * q) / (1.0 - keep2 * q);
  p.batch_min = std::max(1.0, 2.0 * pc.sigma_sgd2 / (pc.dim * s2));
  p.steps_min = (2.0 * l * gap * (16.0 / (m * m * m) + 16.0 / (m * m) - 4.0 / m - 4.0) +
                 pc.grad0_norm_sq) /
                (pc.dim * s2);
  p.steps_below_min = t < p.steps_min;
  return p;
}

Theorem2Bound Thm2Rhs(const ProblemConstants& pc, double eta, double kappa, double gamma,
                      double sigma_dp, std::int64_t steps, double batch_size) {
  pc.Validate();
  if (steps < 1) throw std::invalid_argument("T must be >= 1");
  if (!(batch_size >= 1.0)) throw std::invalid_argument("B must be >= 1");
  const TheoryConstants c = ComputeConstants(eta, kappa, gamma, pc.smoothness);
  if (!(c.m1 > 0.0)) throw std::invalid_argument("bound undefined: M_1 <= 0");
  const double shift = std::abs(1.0 + gamma);
  Theorem2Bound b;
  b.optimization_term = 2.0 * (pc.f0_minus_fstar + c.beta * pc.grad0_norm_sq) /
                        (c.m1 * eta * static_cast<double>(steps));
  b.noise_term = 2.0 * (c.beta + eta * eta * pc.smoothness) * kappa * kappa / (c.m1 * eta) *
                 ((2.0 + shift) * pc.sigma_sgd2 / batch_size + pc.dim * sigma_dp * sigma_dp);
  b.total = b.optimization_term + b.noise_term;
  return b;
}

double Cor1Rhs(const ProblemConstants& pc, double sigma_dp, std::int64_t steps) {
  if (steps < 1) throw std::invalid_argument("T must be >= 1");
  const double m = MKappa(pc);
  return 8.0 * std::sqrt(m * pc.smoothness * pc.f0_minus_fstar * pc.dim * sigma_dp * sigma_dp /
                         static_cast<double>(steps));
}

Theorem3Bound Thm3Rhs(const ProblemConstants& pc, double n, double epsilon, double delta,
                      double clip) {
  if (!(n >= 1.0)) throw std::invalid_argument("N must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
  if (!(clip > 0.0)) throw std::invalid_argument("C must be > 0");
  const double m = MKappa(pc);
  const double log_term = std::log(1.0 / delta);
  Theorem3Bound b;
  b.bound = 4.0 * clip * std::sqrt(2.0 * m * pc.smoothness * pc.f0_minus_fstar * pc.dim * log_term) /
            (n * epsilon);
  b.steps = std::sqrt(2.0) * n * epsilon / (clip * std::sqrt(pc.dim * log_term));
  return b;
}

}  // namespace disk
