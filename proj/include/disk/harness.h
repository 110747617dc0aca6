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

#ifndef DISK_HARNESS_H_
#define DISK_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disk/disk.h"
#include "disk/full_kf.h"
#include "disk/objectives.h"
#include "disk/privacy.h"

namespace disk {

// Which objective and data a run uses. Data is generated from the master seed
// unless `data_csv` names a file written by WriteDatasetCsv.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::kLinearRegression;
  std::size_t num_samples = 1000;
  std::size_t dim = 20;  // feature dimension p
  double noise_std = 0.1;
  // Quadratic only: Hessian spectrum (default: evenly spaced in [1, 10]) and
  // the spread of the per-sample centres.
  std::vector<double> eigenvalues;
  double center_std = 1.0;
  std::size_t mlp_hidden = 16;
  std::string data_csv;
};

struct Problem {
  std::unique_ptr<Objective> objective;
  Dataset data;
};

Problem BuildProblem(const ObjectiveSpec& spec, std::uint64_t master_seed);

enum class Algorithm { kDpsgd, kDisk, kNoisyGd, kNoisyLp, kNoisyKf, kFullKf };

std::string_view ToString(Algorithm algorithm);
Algorithm AlgorithmFromString(std::string_view name);

struct ExperimentConfig {
  ObjectiveSpec objective;
  Algorithm algorithm = Algorithm::kDisk;
  DiskConfig disk;  // disk.sigma_dp is ignored; see target / sigma_dp below
  // When set, the step size is this value divided by the smoothness of F.
  std::optional<double> lr_over_smoothness;
  // Full Kalman filter settings (algorithm = full-kf). sigma_w2 defaults to
  // max(sigma_dp^2, 1e-12).
  std::optional<double> kf_sigma_w2;
  double kf_sigma_h2 = 0.0;
  double kf_sigma_v2 = 0.0;
  HessianMode kf_hessian_mode = HessianMode::kFiniteDifference;
  // Exactly one of these two is set.
  std::optional<PrivacyBudget> target;
  std::optional<double> sigma_dp;
  // delta used for epsilon bookkeeping with an explicit sigma; defaults to
  // N^-1.1.
  std::optional<double> delta;
  std::int64_t steps = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;  // master seed: data, and the first run
  int num_seeds = 1;       // runs use seed, seed + 1, ...
  // x_0 ~ init_std N(0, I); defaults to 0.1 for the MLP and 0 otherwise.
  std::optional<double> init_std;
  std::string output_dir = "out";

  // Throws std::invalid_argument describing the first problem found.
  void Validate() const;
  std::vector<std::uint64_t> Seeds() const;
};

struct StepRecord {
  std::int64_t step = 0;  // 1-based; values describe x_step
  double loss = 0.0;
  double grad_norm = 0.0;
  double filtered_grad_norm = 0.0;
  double epsilon_spent = 0.0;
};

struct NoisePlan {
  double sigma_dp = 0.0;
  double noise_multiplier = 0.0;  // sigma_dp / sensitivity; 0 when not private
  double sampling_rate = 1.0;
  double delta = 0.0;
  bool private_run = false;  // finite sensitivity and sigma_dp > 0
};

struct MetricsTrace {
  std::uint64_t seed = 0;
  NoisePlan noise;
  double initial_loss = 0.0;
  double initial_grad_norm = 0.0;
  std::vector<StepRecord> records;
  double final_loss = 0.0;
  // (1/T) sum_{t=0}^{T} |grad F(x_t)|^2, including x_0.
  double mean_sq_grad_norm = 0.0;
  double epsilon_spent = std::numeric_limits<double>::infinity();
  Vector final_x;
};

// cfg.disk.lr, or lr_over_smoothness / L when that is set.
double ResolveStepSize(const ExperimentConfig& cfg, const Problem& problem);

// Effective batch size: the full dataset for the noisy-* baselines.
std::size_t EffectiveBatchSize(const ExperimentConfig& cfg, std::size_t n);

// Resolves sigma_dp from the target or the explicit value, and the quantities
// needed for privacy bookkeeping. Propagates InfeasibleBudgetError.
NoisePlan PlanNoise(const ExperimentConfig& cfg, std::size_t n);

// The initial iterate for `run_seed`.
Vector InitialPoint(const ExperimentConfig& cfg, const Objective& obj, std::uint64_t run_seed);

// One run of cfg.algorithm for cfg.steps steps; deterministic in (cfg, run_seed).
MetricsTrace RunExperiment(const ExperimentConfig& cfg, const Problem& problem,
                           std::uint64_t run_seed);
MetricsTrace RunExperiment(const ExperimentConfig& cfg, std::uint64_t run_seed);

// Every seed of cfg, in seed order.
std::vector<MetricsTrace> RunAllSeeds(const ExperimentConfig& cfg);

// --- filter comparison -----------------------------------------------------

struct ComparisonRow {
  double sigma_dp = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
};

struct ComparisonSummaryRow {
  double sigma_dp = 0.0;
  std::string method;
  double mean_final_loss = 0.0;
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;
  std::vector<ComparisonSummaryRow> summary;  // |levels| x 3, level-major
  double noise_unit = 1.0;                    // |grad F(x_0)| / sqrt(d)
};

// Runs noisy-gd, noisy-lp and noisy-kf at each noise level and seed of `base`
// with the same step size and noise streams. With `relative`, each level is
// multiplied by |grad F(x_0)| / sqrt(d).
ComparisonResult CompareFilters(const ExperimentConfig& base, const std::vector<double>& levels,
                                bool relative);

// --- (kappa, gamma) sweep --------------------------------------------------

struct SweepCell {
  double kappa = 0.0;
  double gamma = 0.0;
  double metric = 0.0;  // seed-averaged final loss
};

struct SweepResult {
  std::vector<double> kappas;
  std::vector<double> gammas;
  std::vector<SweepCell> cells;  // kappa-major
  double at(std::size_t i, std::size_t j) const { return cells[i * gammas.size() + j].metric; }
};

// One seed-averaged DiSK run per grid cell; cells run concurrently.
SweepResult SweepKappaGamma(const ExperimentConfig& base, const std::vector<double>& kappas,
                            const std::vector<double>& gammas);

}  // namespace disk

#endif  // DISK_HARNESS_H_
