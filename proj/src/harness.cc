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

#include "disk/harness.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <stdexcept>

#include "disk/rng.h"

namespace disk {
namespace {

bool IsFullBatchBaseline(Algorithm a) {
  return a == Algorithm::kNoisyGd || a == Algorithm::kNoisyLp || a == Algorithm::kNoisyKf;
}

ClipMethod EffectiveClip(const ExperimentConfig& cfg) {
  return IsFullBatchBaseline(cfg.algorithm) ? ClipMethod::kNone : cfg.disk.clip;
}

FullKfConfig MakeFullKfConfig(const ExperimentConfig& cfg, const DiskConfig& dc) {
  FullKfConfig kc;
  kc.lr = dc.lr;
  kc.clip = dc.clip;
  kc.clip_threshold = dc.clip_threshold;
  kc.sigma_dp = dc.sigma_dp;
  kc.base = dc.base;
  kc.hyper = dc.hyper;
  kc.sigma_w2 = cfg.kf_sigma_w2.value_or(std::max(dc.sigma_dp * dc.sigma_dp, 1e-12));
  kc.sigma_h2 = cfg.kf_sigma_h2;
  kc.sigma_v2 = cfg.kf_sigma_v2;
  kc.hessian_mode = cfg.kf_hessian_mode;
  kc.fd_step = dc.gamma;
  return kc;
}

// Runs fn(i) for i in [0, count) across threads; rethrows the first failure.
template <typename Fn>
void ParallelFor(std::size_t count, Fn fn) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(disk_harness_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double ResolveStepSize(const ExperimentConfig& cfg, const Problem& problem) {
  if (!cfg.lr_over_smoothness) return cfg.disk.lr;
  const std::optional<double> l = problem.objective->Smoothness(problem.data);
  if (!l || !(*l > 0.0)) {
    throw std::invalid_argument("lr_over_smoothness needs an objective with a known smoothness constant");
  }
  return *cfg.lr_over_smoothness / *l;
}

std::string_view ToString(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDpsgd:
      return "dpsgd";
    case Algorithm::kDisk:
      return "disk";
    case Algorithm::kNoisyGd:
      return "noisy-gd";
    case Algorithm::kNoisyLp:
      return "noisy-lp";
    case Algorithm::kNoisyKf:
      return "noisy-kf";
    case Algorithm::kFullKf:
      return "full-kf";
  }
  return "unknown";
}

Algorithm AlgorithmFromString(std::string_view name) {
  for (Algorithm a : {Algorithm::kDpsgd, Algorithm::kDisk, Algorithm::kNoisyGd, Algorithm::kNoisyLp,
                      Algorithm::kNoisyKf, Algorithm::kFullKf}) {
    if (ToString(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

Problem BuildProblem(const ObjectiveSpec& spec, std::uint64_t master_seed) {
  Problem problem;
  std::size_t p = spec.dim;
  if (!spec.data_csv.empty()) {
    problem.data = ReadDatasetCsv(spec.data_csv);
    p = problem.data.feature_dim();
  }
  const bool generate = spec.data_csv.empty();
  switch (spec.kind) {
    case ObjectiveKind::kQuadratic: {
      std::vector<double> eig = spec.eigenvalues;
      if (eig.empty()) {
        eig.resize(p);
        for (std::size_t i = 0; i < p; ++i) {
          eig[i] = p == 1 ? 1.0 : 1.0 + 9.0 * static_cast<double>(i) / static_cast<double>(p - 1);
        }
      }
      if (eig.size() != p) throw std::invalid_argument("quadratic: need one eigenvalue per dimension");
      problem.objective = MakeQuadratic(p, RandomSpdMatrix(eig, master_seed));
      if (generate) problem.data = GenQuadraticCenters(spec.num_samples, p, spec.center_std, master_seed).data;
      break;
    }
    case ObjectiveKind::kLinearRegression:
      problem.objective = MakeLinearRegression(p);
      if (generate) problem.data = GenLinearRegression(spec.num_samples, p, spec.noise_std, master_seed).data;
      break;
    case ObjectiveKind::kLogisticRegression:
      problem.objective = MakeLogisticRegression(p);
      if (generate) problem.data = GenLogisticRegression(spec.num_samples, p, master_seed).data;
      break;
    case ObjectiveKind::kMlp:
      problem.objective = MakeMlp(p, spec.mlp_hidden);
      if (generate) problem.data = GenLinearRegression(spec.num_samples, p, spec.noise_std, master_seed).data;
      break;
  }
  return problem;
}

void ExperimentConfig::Validate() const {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (num_seeds < 1) throw std::invalid_argument("num_seeds must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (target.has_value() == sigma_dp.has_value()) {
    throw std::invalid_argument("set exactly one of a privacy target (epsilon, delta) or sigma_dp");
  }
  if (target) {
    target->Validate();
    if (EffectiveClip(*this) == ClipMethod::kNone) {
      throw std::invalid_argument("a privacy target needs clipping (algorithm " +
                                  std::string(ToString(algorithm)) + " does not clip)");
    }
  }
  if (sigma_dp && !(*sigma_dp >= 0.0)) throw std::invalid_argument("sigma_dp must be >= 0");
  if (delta && !(*delta > 0.0 && *delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
  if (init_std && !(*init_std >= 0.0)) throw std::invalid_argument("init_std must be >= 0");
  if (lr_over_smoothness && !(*lr_over_smoothness > 0.0)) {
    throw std::invalid_argument("lr_over_smoothness must be > 0");
  }
  if (kf_sigma_w2 && !(*kf_sigma_w2 > 0.0)) throw std::invalid_argument("kf sigma_w2 must be > 0");
  disk.Validate();
}

std::vector<std::uint64_t> ExperimentConfig::Seeds() const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(std::max(num_seeds, 0)));
  std::iota(out.begin(), out.end(), seed);
  return out;
}

std::size_t EffectiveBatchSize(const ExperimentConfig& cfg, std::size_t n) {
  return IsFullBatchBaseline(cfg.algorithm) ? n : cfg.batch_size;
}

NoisePlan PlanNoise(const ExperimentConfig& cfg, std::size_t n) {
  NoisePlan plan;
  const std::size_t b = EffectiveBatchSize(cfg, n);
  if (b > n) throw std::invalid_argument("batch size exceeds the dataset size");
  plan.sampling_rate = static_cast<double>(b) / static_cast<double>(n);
  const double sensitivity = BatchMeanSensitivity(EffectiveClip(cfg), cfg.disk.clip_threshold, b);
  if (cfg.target) {
    plan.delta = cfg.target->delta;
    plan.noise_multiplier =
        CalibrateNoiseMultiplier(cfg.target->epsilon, plan.delta, plan.sampling_rate, cfg.steps);
    plan.sigma_dp = plan.noise_multiplier * sensitivity;
    plan.private_run = true;
    return plan;
  }
  plan.delta = cfg.delta ? *cfg.delta : (n > 1 ? DeltaConvention(static_cast<std::int64_t>(n)) : 0.5);
  plan.sigma_dp = cfg.sigma_dp.value_or(0.0);
  plan.private_run = std::isfinite(sensitivity) && plan.sigma_dp > 0.0;
  plan.noise_multiplier = plan.private_run ? plan.sigma_dp / sensitivity : 0.0;
  return plan;
}

Vector InitialPoint(const ExperimentConfig& cfg, const Objective& obj, std::uint64_t run_seed) {
  const double scale =
      cfg.init_std.value_or(obj.kind() == ObjectiveKind::kMlp ? 0.1 : 0.0);
  Vector x(obj.dim(), 0.0);
  if (scale > 0.0) {
    Rng rng = MakeStream(run_seed, kInitStream);
    std::normal_distribution<double> normal;
    for (double& v : x) v = scale * normal(rng);
  }
  return x;
}

MetricsTrace RunExperiment(const ExperimentConfig& cfg, const Problem& problem,
                           std::uint64_t run_seed) {
  cfg.Validate();
  const Objective& obj = *problem.objective;
  const Dataset& data = problem.data;
  const std::size_t n = data.size();
  const std::size_t b = EffectiveBatchSize(cfg, n);

  MetricsTrace trace;
  trace.seed = run_seed;
  trace.noise = PlanNoise(cfg, n);
  RdpCurve curve;
  if (trace.noise.private_run) {
    curve = SubsampledGaussianCurve(trace.noise.sampling_rate, trace.noise.noise_multiplier);
  }

  DiskConfig dc = cfg.disk;
  dc.sigma_dp = trace.noise.sigma_dp;
  if (cfg.lr_over_smoothness) dc.lr = ResolveStepSize(cfg, problem);
  if (IsFullBatchBaseline(cfg.algorithm)) dc.clip = ClipMethod::kNone;
  if (cfg.algorithm == Algorithm::kNoisyLp) dc.two_point = false;
  if (cfg.algorithm == Algorithm::kNoisyKf) dc.two_point = true;

  Vector x0 = InitialPoint(cfg, obj, run_seed);
  trace.initial_loss = FullLoss(obj, x0, data);
  const double g0 = Norm(FullGradient(obj, x0, data));
  trace.initial_grad_norm = g0;
  double sum_sq = g0 * g0;

  Rng noise_rng = MakeStream(run_seed, kNoiseStream);
  MinibatchSampler sampler(n, b, run_seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  DiskState ds;
  FullKfState ks;
  FullKfConfig kc;
  if (cfg.algorithm == Algorithm::kFullKf) {
    kc = MakeFullKfConfig(cfg, dc);
    ks = FullKfState::Init(std::move(x0), kc);
  } else {
    ds = DiskState::Init(std::move(x0));
  }

  trace.records.reserve(static_cast<std::size_t>(cfg.steps));
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    const std::span<const std::size_t> batch =
        IsFullBatchBaseline(cfg.algorithm) ? std::span<const std::size_t>(all) : sampler.Next();
    switch (cfg.algorithm) {
      case Algorithm::kDpsgd:
      case Algorithm::kNoisyGd:
        DpsgdStep(ds, obj, data, batch, dc, noise_rng);
        break;
      case Algorithm::kDisk:
      case Algorithm::kNoisyLp:
      case Algorithm::kNoisyKf:
        DiskStep(ds, obj, data, batch, dc, noise_rng);
        break;
      case Algorithm::kFullKf:
        FullKfStep(ks, obj, data, batch, kc, noise_rng);
        break;
    }
    const Vector& x = cfg.algorithm == Algorithm::kFullKf ? ks.x : ds.x;
    const Vector& filtered = cfg.algorithm == Algorithm::kFullKf ? ks.filtered_grad : ds.filtered_grad;
    StepRecord rec;
    rec.step = t;
    rec.loss = FullLoss(obj, x, data);
    rec.grad_norm = Norm(FullGradient(obj, x, data));
    rec.filtered_grad_norm = Norm(filtered);
    rec.epsilon_spent = trace.noise.private_run
                            ? ComposeAndConvert(curve, t, trace.noise.delta).epsilon
                            : std::numeric_limits<double>::infinity();
    sum_sq += rec.grad_norm * rec.grad_norm;
    trace.records.push_back(rec);
  }
  trace.final_x = cfg.algorithm == Algorithm::kFullKf ? ks.x : ds.x;
  trace.final_loss = trace.records.back().loss;
  trace.epsilon_spent = trace.records.back().epsilon_spent;
  trace.mean_sq_grad_norm = sum_sq / static_cast<double>(cfg.steps);
  return trace;
}

MetricsTrace RunExperiment(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  const Problem problem = BuildProblem(cfg.objective, cfg.seed);
  return RunExperiment(cfg, problem, run_seed);
}

std::vector<MetricsTrace> RunAllSeeds(const ExperimentConfig& cfg) {
  cfg.Validate();
  const Problem problem = BuildProblem(cfg.objective, cfg.seed);
  std::vector<MetricsTrace> out;
  for (std::uint64_t s : cfg.Seeds()) out.push_back(RunExperiment(cfg, problem, s));
  return out;
}

ComparisonResult CompareFilters(const ExperimentConfig& base, const std::vector<double>& levels,
                                bool relative) {
  if (levels.empty()) throw std::invalid_argument("compare_filters: no noise levels");
  const Problem problem = BuildProblem(base.objective, base.seed);
  const Objective& obj = *problem.objective;

  ComparisonResult result;
  if (relative) {
    const Vector x0 = InitialPoint(base, obj, base.seed);
    result.noise_unit = Norm(FullGradient(obj, x0, problem.data)) /
                        std::sqrt(static_cast<double>(obj.dim()));
  }
  const Algorithm methods[] = {Algorithm::kNoisyGd, Algorithm::kNoisyLp, Algorithm::kNoisyKf};
  const std::vector<std::uint64_t> seeds = base.Seeds();
  const std::size_t per_level = 3 * seeds.size();
  result.rows.resize(levels.size() * per_level);

  ParallelFor(result.rows.size(), [&](std::size_t job) {
    const std::size_t level = job / per_level;
    const std::size_t method = (job % per_level) / seeds.size();
    const std::uint64_t seed = seeds[job % seeds.size()];
    ExperimentConfig cfg = base;
    cfg.algorithm = methods[method];
    cfg.target.reset();
    cfg.sigma_dp = levels[level] * result.noise_unit;
    cfg.disk.parallel = false;
    const MetricsTrace trace = RunExperiment(cfg, problem, seed);
    result.rows[job] = {*cfg.sigma_dp, std::string(ToString(cfg.algorithm)), seed, trace.final_loss};
  });

  for (std::size_t level = 0; level < levels.size(); ++level) {
    for (std::size_t m = 0; m < 3; ++m) {
      double sum = 0.0;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        sum += result.rows[level * per_level + m * seeds.size() + s].final_loss;
      }
      result.summary.push_back({levels[level] * result.noise_unit, std::string(ToString(methods[m])),
                                sum / static_cast<double>(seeds.size())});
    }
  }
  return result;
}

SweepResult SweepKappaGamma(const ExperimentConfig& base, const std::vector<double>& kappas,
                            const std::vector<double>& gammas) {
  if (kappas.empty() || gammas.empty()) throw std::invalid_argument("sweep: empty grid");
  const Problem problem = BuildProblem(base.objective, base.seed);
  SweepResult result;
  result.kappas = kappas;
  result.gammas = gammas;
  result.cells.resize(kappas.size() * gammas.size());
  const std::vector<std::uint64_t> seeds = base.Seeds();

  ParallelFor(result.cells.size(), [&](std::size_t cell) {
    ExperimentConfig cfg = base;
    cfg.algorithm = Algorithm::kDisk;
    cfg.disk.kappa = kappas[cell / gammas.size()];
    cfg.disk.gamma = gammas[cell % gammas.size()];
    cfg.disk.parallel = false;
    double sum = 0.0;
    try {
      for (std::uint64_t s : seeds) sum += RunExperiment(cfg, problem, s).final_loss;
      sum /= static_cast<double>(seeds.size());
    } catch (const NonFiniteGradientError&) {
      sum = std::numeric_limits<double>::infinity();  // diverged
    }
    result.cells[cell] = {cfg.disk.kappa, cfg.disk.gamma, sum};
  });
  return result;
}

}  // namespace disk
