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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "disk/disk.h"
#include "disk/harness.h"
#include "disk/kalman.h"
#include "disk/objectives.h"
#include "disk/privacy.h"
#include "disk/reductions.h"
#include "disk/rng.h"
#include "disk/theory.h"

namespace disk {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

std::vector<std::size_t> AllIndices(std::size_t n) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

Vector StartPoint(std::size_t d) {
  Vector x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = 0.3 * std::sin(1.0 + static_cast<double>(i));
  return x;
}

// 1. DiSK with kappa = 1 and DPSGD: identical trajectories.
Outcome DpsgdReduction() {
  const SyntheticProblem prob = GenLogisticRegression(200, 10, 1);
  const auto obj = MakeLogisticRegression(10);
  DiskConfig cfg;
  cfg.kappa = 1.0;
  cfg.gamma = 0.7;
  cfg.lr = 0.05;
  cfg.clip = ClipMethod::kStandard;
  cfg.clip_threshold = 0.5;
  cfg.sigma_dp = 0.2;
  DiskState a = DiskState::Init(StartPoint(10)), b = a;
  MinibatchSampler sa(200, 20, 5), sb(200, 20, 5);
  Rng na = MakeStream(9, kNoiseStream), nb = MakeStream(9, kNoiseStream);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    DiskStep(a, *obj, prob.data, sa.Next(), cfg, na);
    DpsgdStep(b, *obj, prob.data, sb.Next(), cfg, nb);
    if (a.x != b.x) ++mismatches;
  }
  return {mismatches == 0, Format("%.0f of 200 steps differ", mismatches)};
}

// 2. NAG map gamma = (1 - kappa)/kappa, eta = kappa, mu = 1 - kappa against
// the textbook NAG look-ahead x - mu m. NAG's step is eta kappa so that its
// momentum equals eta times the filtered gradient.
Outcome NagReduction() {
  const SyntheticProblem prob = GenLogisticRegression(100, 5, 3);
  const auto obj = MakeLogisticRegression(5);
  const auto batch = AllIndices(100);
  double worst = 0.0, worst_matched = 0.0;
  for (double kappa : {0.3, 0.5, 0.9}) {
    DiskConfig cfg;
    cfg.kappa = kappa;
    cfg.gamma = (1.0 - kappa) / kappa;
    cfg.lr = kappa;
    cfg.clip = ClipMethod::kNone;
    cfg.filter_init = FilterInit::kZero;
    DiskState s = DiskState::Init(StartPoint(5));
    NagState nag{StartPoint(5), Vector(5, 0.0)};
    NagState matched = nag;
    Rng rng = MakeStream(0, kNoiseStream);
    for (int t = 0; t < 100; ++t) {
      DiskStep(s, *obj, prob.data, batch, cfg, rng);
      NagStep(nag, 1.0 - kappa, cfg.lr * kappa, *obj, prob.data);
      NagStep(matched, 1.0 - kappa, cfg.lr * kappa, *obj, prob.data, (1.0 - kappa) / kappa);
      worst = std::max(worst, MaxAbsDiff(s.x, nag.x));
      worst_matched = std::max(worst_matched, MaxAbsDiff(s.x, matched.x));
    }
  }
  return {worst <= 1e-10,
          Format("max dev %.3g vs look-ahead mu; %.3g vs look-ahead (1-kappa)/kappa", worst,
                 worst_matched)};
}

// 3. STORM map gamma = -1, alpha = kappa, B = 1 on a shared sample stream.
Outcome StormReduction() {
  const SyntheticProblem prob = GenLogisticRegression(50, 4, 4);
  const auto obj = MakeLogisticRegression(4);
  double worst = 0.0;
  for (double kappa : {0.2, 0.6, 1.0}) {
    DiskConfig cfg;
    cfg.kappa = kappa;
    cfg.gamma = -1.0;
    cfg.lr = 0.1;
    cfg.clip = ClipMethod::kNone;
    MinibatchSampler peek(50, 1, 8);
    const std::size_t first = peek.Next()[0];
    DiskState s = DiskState::Init(StartPoint(4));
    StormState storm = StormInit(*obj, StartPoint(4), prob.data.sample(first));
    Rng rng = MakeStream(0, kNoiseStream);
    MinibatchSampler stream(50, 1, 8);
    for (int t = 0; t < 100; ++t) {
      const auto b = stream.Next();
      DiskStep(s, *obj, prob.data, b, cfg, rng);
      StormStep(storm, kappa, cfg.lr, *obj, prob.data.sample(b[0]));
      worst = std::max(worst, MaxAbsDiff(s.x, storm.x));
    }
  }
  return {worst <= 1e-10, Format("max dev %.3g", worst)};
}

// 4. Scalar gain at (0, 1, 1): golden-ratio limit and geometric rate.
Outcome ScalarGain() {
  const ScalarFixedPoint fp = ComputeScalarFixedPoint(0.0, 1.0, 1.0);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarGainState s{0.0, 1.0, 0.0, 1.0, 1.0};
  double prev_gap = -1.0, ratio = -1.0;
  for (int t = 0; t < 200; ++t) {
    s = ScalarGainStep(s);
    const double gap = std::abs(s.k - golden);
    if (ratio < 0.0 && prev_gap > 0.0 && gap < 1e-5 && gap > 1e-11) ratio = gap / prev_gap;
    prev_gap = gap;
  }
  const bool pass = std::abs(s.k - 0.618034) <= 1e-6 && std::abs(fp.k_inf - golden) <= 1e-12 &&
                    ratio > 0.0 && std::abs(ratio - fp.c_k) <= 0.05 * fp.c_k &&
                    std::abs(fp.c_k - 0.1459) <= 1e-4;
  return {pass, Format("k_inf %.9f, measured ratio %.5f, c_k %.5f", s.k, ratio, fp.c_k)};
}

// 5. Kalman filter against raw inverted observations.
Outcome Blue() {
  const LinearSystem sys = RandomStableSystem(3, 7);
  const std::vector<BlueRun> runs = RunBlueSimulation(sys, 50, 10000, 7);
  double raw = 0.0, kf = 0.0, min_eig = INFINITY;
  for (const BlueRun& r : runs) {
    raw += r.mse_raw;
    kf += r.mse_kf;
    min_eig = std::min(min_eig, r.min_covariance_eigenvalue);
  }
  return {kf <= 0.9 * raw && min_eig >= -1e-10,
          Format("MSE kf/raw %.4f, min eig %.3g", kf / raw, min_eig)};
}

// 6. Filter comparison on synthetic linear regression.
Outcome FilterComparison() {
  ExperimentConfig cfg;
  cfg.objective.kind = ObjectiveKind::kLinearRegression;
  cfg.objective.num_samples = 1000;
  cfg.objective.dim = 20;
  cfg.disk.kappa = 0.5;
  cfg.disk.gamma = 1.0;
  cfg.lr_over_smoothness = 1.0;
  cfg.sigma_dp = 0.0;
  cfg.steps = 500;
  cfg.num_seeds = 5;
  cfg.seed = 0;
  const std::vector<double> levels = {0.01, 0.03, 0.1, 0.3, 1.0};
  const ComparisonResult r = CompareFilters(cfg, levels, true);
  bool pass = true;
  double worst_gd = 0.0, worst_lp = 0.0;  // largest kf / baseline ratio
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double gd = r.summary[3 * i].mean_final_loss;
    const double lp = r.summary[3 * i + 1].mean_final_loss;
    const double kf = r.summary[3 * i + 2].mean_final_loss;
    pass = pass && kf <= gd && kf <= lp;
    worst_gd = std::max(worst_gd, kf / gd);
    worst_lp = std::max(worst_lp, kf / lp);
  }
  return {pass, Format("max loss ratio kf/gd %.4f, kf/lp %.4f", worst_gd, worst_lp)};
}

// 7. Average squared gradient norm against the corollary bound.
Outcome CorollaryBound() {
  const std::size_t d = 10;
  Vector hessian(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) hessian[i * d + i] = static_cast<double>(i + 1);
  const auto obj = MakeQuadratic(d, hessian);
  const Dataset data(d, Vector(d, 0.0), Vector{0.0});  // one sample: sigma_SGD = 0
  const Vector x0(d, 0.1);
  ProblemConstants pc;
  pc.smoothness = 10.0;
  pc.f0_minus_fstar = FullLoss(*obj, x0, data);  // F* = 0 at the centre
  pc.grad0_norm_sq = SquaredNorm(FullGradient(*obj, x0, data));
  pc.sigma_sgd2 = 0.0;
  pc.dim = static_cast<double>(d);
  const double sigma = 0.1;
  const Corollary1Params probe = ComputeCorollary1Params(pc, sigma, 1);
  const auto steps = static_cast<std::int64_t>(std::ceil(probe.steps_min));
  const Corollary1Params p = ComputeCorollary1Params(pc, sigma, steps);
  const double rhs = Cor1Rhs(pc, sigma, steps);

  DiskConfig cfg;
  cfg.kappa = p.kappa;
  cfg.gamma = -1.0;
  cfg.lr = p.eta;
  cfg.clip = ClipMethod::kNone;
  cfg.sigma_dp = sigma;
  cfg.parallel = false;
  const std::vector<std::size_t> batch = {0};
  int held = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DiskState s = DiskState::Init(x0);
    Rng rng = MakeStream(seed, kNoiseStream);
    double sum = pc.grad0_norm_sq;  // t = 0
    for (std::int64_t t = 1; t < steps; ++t) {
      DiskStep(s, *obj, data, batch, cfg, rng);
      sum += SquaredNorm(FullGradient(*obj, s.x, data));
    }
    const double lhs = sum / static_cast<double>(steps);
    worst = std::max(worst, lhs / rhs);
    if (lhs <= rhs) ++held;
  }
  return {held == 10, Format("%.0f/10 seeds, T = %.0f, max lhs/rhs %.4f", held,
                             static_cast<double>(steps), worst)};
}

// 8. Calibration then accounting returns the target.
Outcome PrivacyRoundTrip() {
  const std::int64_t n = 50000;
  const double delta = DeltaConvention(n);
  double worst = 0.0, prev_sigma = INFINITY;
  bool monotone = true;
  for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double z = CalibrateNoiseMultiplier(eps, delta, 0.01, 2000);
    const double spent = ComposeAndConvert(SubsampledGaussianCurve(0.01, z), 2000, delta).epsilon;
    worst = std::max(worst, std::abs(spent - eps));
    monotone = monotone && z < prev_sigma;
    prev_sigma = z;
  }
  return {worst <= 1e-3 && monotone, Format("max |eps - target| %.3g", worst) +
                                          (monotone ? ", sigma decreasing" : ", sigma not decreasing")};
}

// Phi condition evaluated in extended precision.
double PhiCondition(double sens, double eps, double sigma) {
  const auto cdf = [](long double x) { return 0.5L * std::erfc(-x / std::sqrt(2.0L)); };
  const long double a = sens / (2.0L * sigma);
  const long double b = static_cast<long double>(eps) * sigma / sens;
  return static_cast<double>(cdf(a - b) - std::exp(static_cast<long double>(eps)) * cdf(-a - b));
}

// 9. Analytic Gaussian calibration.
Outcome GaussianCalibration() {
  bool pass = true;
  double worst_slack = 0.0;
  for (double eps : {0.1, 1.0, 4.0}) {
    const double sigma = CalibrateGaussian(1.0, eps, 1e-6);
    const double slack = 1e-6 - PhiCondition(1.0, eps, sigma);
    worst_slack = std::max(worst_slack, std::abs(slack));
    pass = pass && slack >= 0.0 && slack <= 1e-8;
    pass = pass && PhiCondition(1.0, eps, sigma * (1.0 - 1e-6)) > 1e-6;
    pass = pass && sigma < ClassicalGaussianSigma(1.0, eps, 1e-6);
  }
  return {pass, Format("max slack %.3g", worst_slack)};
}

// 10. Gradients against central differences; quadratic Hessian identity.
Outcome GradientCorrectness() {
  const std::size_t p = 6;
  double worst = 0.0;
  for (ObjectiveKind kind : {ObjectiveKind::kQuadratic, ObjectiveKind::kLinearRegression,
                             ObjectiveKind::kLogisticRegression, ObjectiveKind::kMlp}) {
    ObjectiveSpec spec;
    spec.kind = kind;
    spec.num_samples = 100;
    spec.dim = p;
    spec.mlp_hidden = 8;
    const Problem prob = BuildProblem(spec, 2);
    const Objective& obj = *prob.objective;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    const double scale = kind == ObjectiveKind::kQuadratic || kind == ObjectiveKind::kLinearRegression ? 1.0 : 0.5;
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(obj.dim());
      for (double& v : x) v = scale * normal(rng);
      const SampleView s = prob.data.sample(static_cast<std::size_t>(trial));
      const Vector g = PerSampleGrad(obj, x, s);
      Vector fd(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        Vector up = x, down = x;
        up[i] += 1e-6;
        down[i] -= 1e-6;
        fd[i] = (obj.Loss(up, s) - obj.Loss(down, s)) / 2e-6;
      }
      worst = std::max(worst, Norm(Subtract(g, fd)) / Norm(g));
    }
  }
  // grad F(x + gamma v) - grad F(x) = gamma H v on a quadratic.
  const std::size_t d = 8;
  const Vector h = RandomSpdMatrix(std::vector<double>{1, 2, 3, 5, 8, 13, 21, 34}, 3);
  const auto quad = MakeQuadratic(d, h);
  const Dataset data = GenQuadraticCenters(20, d, 1.0, 6).data;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Vector x(d), v(d), hv(d, 0.0);
  for (double& e : x) e = normal(rng);
  for (double& e : v) e = normal(rng);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) hv[i] += h[i * d + j] * v[j];
  }
  double hvp_dev = 0.0;
  for (double gamma : {1e-3, 0.5, 1.0, -1.0, 10.0}) {
    Vector shifted = x;
    Axpy(gamma, v, shifted);
    Vector fd = Subtract(FullGradient(*quad, shifted, data), FullGradient(*quad, x, data));
    Scale(1.0 / gamma, fd);
    hvp_dev = std::max(hvp_dev, MaxAbsDiff(fd, hv));
  }
  return {worst <= 1e-5 && hvp_dev <= 1e-10,
          Format("max rel err %.3g, Hessian identity dev %.3g", worst, hvp_dev)};
}

// 11. Filtered gradient variance at a frozen iterate.
Outcome NoiseReduction() {
  const std::size_t d = 10, n = 50;
  const auto obj = MakeQuadratic(d, RandomSpdMatrix(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1));
  const Dataset data = GenQuadraticCenters(n, d, 1.0, 1).data;
  const Vector x0(d, 0.5);
  const Vector truth = FullGradient(*obj, x0, data);
  const auto batch = AllIndices(n);
  const int seeds = 100, burn_in = 200, window = 200;
  bool pass = true;
  std::string detail;
  for (double kappa : {0.3, 0.7}) {
    DiskConfig cfg;
    cfg.kappa = kappa;
    cfg.clip = ClipMethod::kNone;
    cfg.sigma_dp = 0.4;
    cfg.filter_init = FilterInit::kZero;
    cfg.parallel = false;
    // Variance across seeds at each step of the window, averaged over the window.
    double var_obs = 0.0, var_filt = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      DiskState s = DiskState::Init(x0);
      Rng rng = MakeStream(static_cast<std::uint64_t>(seed), kNoiseStream);
      for (int t = 0; t < burn_in + window; ++t) {
        DiskStep(s, *obj, data, batch, cfg, rng);
        s.x = x0;
        s.displacement.assign(d, 0.0);
        if (t >= burn_in) {
          var_obs += SquaredNorm(Subtract(s.observed_grad, truth));
          var_filt += SquaredNorm(Subtract(s.filtered_grad, truth));
        }
      }
    }
    var_obs /= static_cast<double>(seeds) * window;
    var_filt /= static_cast<double>(seeds) * window;
    const double bound = 1.1 * kappa / (2.0 - kappa) * var_obs;
    pass = pass && var_filt <= bound && var_filt < var_obs;
    detail += Format("kappa %.1f: filtered/raw %.4f (limit %.4f); ", kappa, var_filt / var_obs,
                     bound / var_obs);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

}  // namespace
}  // namespace disk

int main() {
  using disk::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"DPSGD reduction", disk::DpsgdReduction},
      {"NAG reduction", disk::NagReduction},
      {"STORM reduction", disk::StormReduction},
      {"scalar-gain fixed point", disk::ScalarGain},
      {"Kalman filter vs raw observations", disk::Blue},
      {"filter comparison on linear regression", disk::FilterComparison},
      {"convergence bound on a quadratic", disk::CorollaryBound},
      {"privacy calibration round trip", disk::PrivacyRoundTrip},
      {"Gaussian mechanism calibration", disk::GaussianCalibration},
      {"gradient correctness", disk::GradientCorrectness},
      {"EMA noise reduction", disk::NoiseReduction},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
