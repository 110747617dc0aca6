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

// Command-line front end: train, compare-filters, sweep, calibrate, bounds,
// kalman-demo.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "disk/config.h"
#include "disk/harness.h"
#include "disk/kalman.h"
#include "disk/output.h"
#include "disk/privacy.h"
#include "disk/rng.h"
#include "disk/theory.h"
#include "json.hpp"

namespace {

using nlohmann::json;

// Flags shared by the experiment subcommands. Each one, when given, replaces
// the matching config key.
struct Overrides {
  std::string config_path;
  std::string algorithm, objective, clip, base, filter_init, output_dir;
  double kappa = 0, gamma = 0, lr = 0, lr_over_smoothness = 0, clip_threshold = 0;
  double sigma_dp = 0, epsilon = 0, delta = 0, init_std = 0;
  std::int64_t steps = 0;
  std::size_t batch_size = 0, num_samples = 0, dim = 0;
  std::uint64_t seed = 0;
  int num_seeds = 0;
  std::vector<CLI::Option*> options;
  // `flag` is spelled as on the command line, e.g. "--kappa".
  CLI::Option* Find(const std::string& flag) const {
    const std::string name = flag.substr(flag.find_first_not_of('-'));
    for (CLI::Option* o : options) {
      if (o->check_lname(name)) return o;
    }
    return nullptr;
  }
  bool Given(const std::string& name) const {
    const CLI::Option* o = Find(name);
    return o != nullptr && o->count() > 0;
  }
};

void AddOverrides(CLI::App* app, Overrides& o, bool config_required) {
  CLI::Option* cfg = app->add_option("--config", o.config_path, "JSON config file");
  if (config_required) cfg->required();
  auto add = [&](const std::string& flag, auto& target, const std::string& help) {
    o.options.push_back(app->add_option(flag, target, help));
  };
  add("--algorithm", o.algorithm, "dpsgd | disk | noisy-gd | noisy-lp | noisy-kf | full-kf");
  add("--objective", o.objective, "quadratic | linear-regression | logistic-regression | mlp");
  add("--num-samples", o.num_samples, "dataset size N");
  add("--dim", o.dim, "feature dimension");
  add("--kappa", o.kappa, "filter gain");
  add("--gamma", o.gamma, "look-ahead scale");
  add("--lr", o.lr, "step size");
  add("--lr-over-smoothness", o.lr_over_smoothness, "step size as a multiple of 1/L");
  add("--clip", o.clip, "none | standard | automatic | normalized");
  add("--clip-threshold", o.clip_threshold, "clipping threshold C");
  add("--base", o.base, "sgd | momentum | adam | adamw");
  add("--filter-init", o.filter_init, "first_grad | zero");
  add("--sigma-dp", o.sigma_dp, "explicit noise std (replaces a privacy target)");
  add("--epsilon", o.epsilon, "privacy target epsilon (replaces sigma_dp)");
  add("--delta", o.delta, "privacy delta");
  add("--steps", o.steps, "iterations T");
  add("--batch-size", o.batch_size, "batch size B");
  add("--seed", o.seed, "master seed");
  add("--num-seeds", o.num_seeds, "number of consecutive run seeds");
  add("--init-std", o.init_std, "scale of the random initial point");
  add("--output-dir", o.output_dir, "output directory");
}

// config file < DISK_SEED < explicit flags.
disk::RunConfig ResolveConfig(const Overrides& o, disk::RunConfig rc) {
  if (!o.config_path.empty()) rc = disk::LoadRunConfig(o.config_path);
  disk::ExperimentConfig& e = rc.experiment;
  e.seed = disk::SeedFromEnvironment(e.seed);
  if (o.Given("--algorithm")) e.algorithm = disk::AlgorithmFromString(o.algorithm);
  if (o.Given("--objective")) e.objective.kind = disk::ObjectiveKindFromString(o.objective);
  if (o.Given("--num-samples")) e.objective.num_samples = o.num_samples;
  if (o.Given("--dim")) e.objective.dim = o.dim;
  if (o.Given("--kappa")) e.disk.kappa = o.kappa;
  if (o.Given("--gamma")) e.disk.gamma = o.gamma;
  if (o.Given("--lr")) {
    e.disk.lr = o.lr;
    e.lr_over_smoothness.reset();
  }
  if (o.Given("--lr-over-smoothness")) e.lr_over_smoothness = o.lr_over_smoothness;
  if (o.Given("--clip")) e.disk.clip = disk::ClipMethodFromString(o.clip);
  if (o.Given("--clip-threshold")) e.disk.clip_threshold = o.clip_threshold;
  if (o.Given("--base")) e.disk.base = disk::BaseOptimizerFromString(o.base);
  if (o.Given("--filter-init")) e.disk.filter_init = disk::FilterInitFromString(o.filter_init);
  if (o.Given("--sigma-dp")) {
    e.sigma_dp = o.sigma_dp;
    e.target.reset();
  }
  if (o.Given("--epsilon")) {
    disk::PrivacyBudget b = e.target.value_or(disk::PrivacyBudget{});
    b.epsilon = o.epsilon;
    if (b.delta == 0.0) b.delta = e.delta.value_or(0.0);
    e.target = b;
    e.sigma_dp.reset();
  }
  if (o.Given("--delta")) {
    if (e.target) e.target->delta = o.delta;
    e.delta = o.delta;
  }
  if (e.target && e.target->delta == 0.0) {
    e.target->delta = disk::DeltaConvention(static_cast<std::int64_t>(e.objective.num_samples));
  }
  if (o.Given("--steps")) e.steps = o.steps;
  if (o.Given("--batch-size")) e.batch_size = o.batch_size;
  if (o.Given("--seed")) e.seed = o.seed;
  if (o.Given("--num-seeds")) e.num_seeds = o.num_seeds;
  if (o.Given("--init-std")) e.init_std = o.init_std;
  if (o.Given("--output-dir")) e.output_dir = o.output_dir;
  return rc;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

json Finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int RunTrain(const Overrides& o) {
  disk::RunConfig rc = ResolveConfig(o, {});
  const disk::ExperimentConfig& e = rc.experiment;
  e.Validate();
  const std::vector<disk::MetricsTrace> traces = disk::RunAllSeeds(e);
  json summary = json::array();
  for (const disk::MetricsTrace& t : traces) {
    const std::string stem = "trace_seed" + std::to_string(t.seed);
    const std::string csv = JoinPath(e.output_dir, stem + ".csv");
    disk::WriteTraceCsv(t.records, csv);
    disk::PlotTraceCsv(csv, JoinPath(e.output_dir, stem + ".svg"));
    summary.push_back({{"seed", t.seed},
                       {"sigma_dp", t.noise.sigma_dp},
                       {"noise_multiplier", t.noise.noise_multiplier},
                       {"initial_loss", t.initial_loss},
                       {"final_loss", Finite(t.final_loss)},
                       {"mean_sq_grad_norm", Finite(t.mean_sq_grad_norm)},
                       {"epsilon_spent", Finite(t.epsilon_spent)},
                       {"trace", csv}});
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int RunCompare(const Overrides& o, const std::vector<double>& levels, bool absolute) {
  disk::RunConfig defaults;
  disk::ExperimentConfig& d = defaults.experiment;
  d.objective.kind = disk::ObjectiveKind::kLinearRegression;
  d.disk.kappa = 0.5;
  d.disk.gamma = 1.0;
  d.disk.clip = disk::ClipMethod::kNone;
  d.lr_over_smoothness = 1.0;
  d.sigma_dp = 0.0;
  d.steps = 500;
  d.num_seeds = 5;
  disk::RunConfig rc = ResolveConfig(o, defaults);
  if (!levels.empty()) rc.noise_levels = levels;
  if (absolute) rc.relative_noise = false;
  disk::ExperimentConfig& e = rc.experiment;
  if (!e.sigma_dp && !e.target) e.sigma_dp = 0.0;

  const disk::ComparisonResult r = disk::CompareFilters(e, rc.noise_levels, rc.relative_noise);
  const std::string csv = JoinPath(e.output_dir, "comparison.csv");
  disk::WriteComparisonCsv(r.rows, csv);
  disk::WriteComparisonSummaryCsv(r.summary, JoinPath(e.output_dir, "comparison_summary.csv"));
  disk::PlotComparisonCsv(csv, JoinPath(e.output_dir, "comparison.svg"));
  std::cout << "sigma_dp,method,mean_final_loss\n" << std::setprecision(10);
  for (const auto& row : r.summary) {
    std::cout << row.sigma_dp << ',' << row.method << ',' << row.mean_final_loss << '\n';
  }
  return 0;
}

int RunSweep(const Overrides& o, const std::vector<double>& kappas,
             const std::vector<double>& gammas) {
  disk::RunConfig rc = ResolveConfig(o, {});
  if (!kappas.empty()) rc.kappas = kappas;
  if (!gammas.empty()) rc.gammas = gammas;
  disk::ExperimentConfig& e = rc.experiment;
  if (!e.sigma_dp && !e.target) e.sigma_dp = 0.0;
  const disk::SweepResult s = disk::SweepKappaGamma(e, rc.kappas, rc.gammas);
  const std::string csv = JoinPath(e.output_dir, "sweep.csv");
  disk::WriteSweepCsv(s, csv);
  disk::PlotSweepCsv(csv, JoinPath(e.output_dir, "sweep.svg"));
  std::cout << std::setprecision(10) << disk::kSweepHeader << '\n';
  for (const auto& c : s.cells) std::cout << c.kappa << ',' << c.gamma << ',' << c.metric << '\n';
  return 0;
}

int RunCalibrate(double epsilon, double delta, double q, std::int64_t steps, CLI::Option* clip_opt,
                 double clip, CLI::Option* batch_opt, std::size_t batch) {
  const double z = disk::CalibrateNoiseMultiplier(epsilon, delta, q, steps);
  const disk::RdpCurve curve = disk::SubsampledGaussianCurve(q, z);
  const disk::PrivacySpent spent = disk::ComposeAndConvert(curve, steps, delta);
  json out;
  out["epsilon_target"] = epsilon;
  out["delta"] = delta;
  out["sampling_rate"] = q;
  out["steps"] = steps;
  out["noise_multiplier"] = z;
  out["epsilon_spent"] = spent.epsilon;
  out["best_order"] = spent.order;
  if (clip_opt->count() > 0) {
    const double sensitivity =
        batch_opt->count() > 0 ? clip / static_cast<double>(batch) : clip;
    out["sensitivity"] = sensitivity;
    out["sigma_dp"] = z * sensitivity;
  }
  json orders = json::array();
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double a = curve.orders[i];
    const double total = static_cast<double>(steps) * curve.values[i];
    orders.push_back({{"order", a},
                      {"rdp_per_step", curve.values[i]},
                      {"rdp_total", total},
                      {"epsilon", total + std::log(1.0 / delta) / (a - 1.0)}});
  }
  out["rdp"] = orders;
  std::cout << out.dump(2) << "\n";
  return 0;
}

disk::ProblemConstants DeriveConstants(const disk::ExperimentConfig& e, json& notes) {
  const disk::Problem problem = disk::BuildProblem(e.objective, e.seed);
  const disk::Objective& obj = *problem.objective;
  const disk::Dataset& data = problem.data;
  const disk::Vector x0 = disk::InitialPoint(e, obj, e.seed);
  const std::optional<double> l = obj.Smoothness(data);
  if (!l) throw std::invalid_argument("bounds: the objective has no computable smoothness constant");
  const disk::OptimumEstimate opt = disk::EstimateOptimum(obj, data);
  const disk::Vector g0 = disk::FullGradient(obj, x0, data);

  disk::ProblemConstants pc;
  pc.smoothness = *l;
  pc.f0_minus_fstar = disk::FullLoss(obj, x0, data) - opt.value;
  pc.grad0_norm_sq = disk::SquaredNorm(g0);
  pc.dim = static_cast<double>(obj.dim());
  double var = 0.0;
  double g_max = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const disk::Vector gi = disk::PerSampleGrad(obj, x0, data.sample(i));
    var += disk::SquaredNorm(disk::Subtract(gi, g0));
    g_max = std::max(g_max, disk::Norm(gi));
  }
  pc.sigma_sgd2 = var / static_cast<double>(data.size());
  pc.grad_bound = g_max;
  notes["fstar_exact"] = opt.exact;
  notes["sigma_sgd2_and_G"] = "measured at x_0 only";
  return pc;
}

int RunBounds(const Overrides& o, const std::string& trace_path) {
  disk::RunConfig rc = ResolveConfig(o, {});
  disk::ExperimentConfig& e = rc.experiment;
  if (!e.sigma_dp && !e.target) e.sigma_dp = 0.0;
  json report;
  json notes;
  const disk::ProblemConstants pc = rc.constants ? *rc.constants : DeriveConstants(e, notes);
  pc.Validate();
  const std::size_t n = e.objective.num_samples;
  const disk::NoisePlan plan = disk::PlanNoise(e, n);
  double eta = e.disk.lr;
  if (e.lr_over_smoothness) eta = *e.lr_over_smoothness / pc.smoothness;
  const double kappa = e.disk.kappa;
  const double gamma = e.disk.gamma;
  const double batch = static_cast<double>(disk::EffectiveBatchSize(e, n));

  report["constants"] = {{"L", pc.smoothness},          {"f0_minus_fstar", pc.f0_minus_fstar},
                         {"grad0_norm_sq", pc.grad0_norm_sq}, {"sigma_sgd2", pc.sigma_sgd2},
                         {"G", pc.grad_bound},          {"d", pc.dim}};
  report["notes"] = notes;
  report["parameters"] = {{"eta", eta},     {"kappa", kappa},         {"gamma", gamma},
                          {"steps", e.steps}, {"batch_size", batch}, {"sigma_dp", plan.sigma_dp}};

  const disk::ParameterReport v =
      disk::ValidateParameters(eta, kappa, gamma, e.disk.clip_threshold, pc);
  json validation = {{"valid", v.valid},
                     {"kappa_ok", v.kappa_ok},
                     {"eta_limit_statement", v.eta_limit_statement},
                     {"eta_limit_proof", v.eta_limit_proof},
                     {"eta_ok_statement", v.eta_ok_statement},
                     {"eta_ok_proof", v.eta_ok_proof},
                     {"clip_threshold_lemma", v.clip_threshold_lemma},
                     {"clip_threshold_proof", v.clip_threshold_proof},
                     {"clip_ok_lemma", v.clip_ok_lemma},
                     {"clip_ok_proof", v.clip_ok_proof},
                     {"m1_positive", v.m1_positive},
                     {"coefficient_checks", v.coefficient_checks},
                     {"failures", v.failures}};
  report["validation"] = validation;
  if (v.kappa_ok) {
    report["theory_constants"] = {{"M_gamma", v.constants.m_gamma},
                                  {"M_1", v.constants.m1},
                                  {"beta", v.constants.beta}};
    if (v.constants.m1 > 0.0) {
      const disk::Theorem2Bound b =
          disk::Thm2Rhs(pc, eta, kappa, gamma, plan.sigma_dp, e.steps, batch);
      report["theorem2_rhs"] = {{"optimization_term", b.optimization_term},
                                {"noise_term", b.noise_term},
                                {"total", b.total}};
    }
  }
  if (pc.f0_minus_fstar > 0.0) {
    report["M_kappa"] = disk::MKappa(pc);
    if (plan.sigma_dp > 0.0) {
      const disk::Corollary1Params c = disk::ComputeCorollary1Params(pc, plan.sigma_dp, e.steps);
      report["corollary1"] = {{"eta", c.eta},
                              {"kappa", c.kappa},
                              {"beta", c.beta},
                              {"M_kappa", c.m_kappa},
                              {"batch_min", c.batch_min},
                              {"steps_min", c.steps_min},
                              {"steps_below_min", c.steps_below_min},
                              {"rhs", disk::Cor1Rhs(pc, plan.sigma_dp, e.steps)}};
    }
    if (e.target && e.disk.clip != disk::ClipMethod::kNone) {
      const disk::Theorem3Bound t = disk::Thm3Rhs(pc, static_cast<double>(n), e.target->epsilon,
                                                  e.target->delta, e.disk.clip_threshold);
      report["theorem3"] = {{"rhs", t.bound}, {"steps", t.steps}};
    }
  }
  if (!trace_path.empty()) {
    const std::vector<disk::StepRecord> records = disk::ReadTraceCsv(trace_path);
    double sum = pc.grad0_norm_sq;
    for (const auto& r : records) sum += r.grad_norm * r.grad_norm;
    report["empirical_lhs"] = records.empty() ? json(nullptr)
                                              : json(sum / static_cast<double>(records.size()));
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int RunKalmanDemo(int runs, int steps, int dim, std::uint64_t seed, bool seed_given,
                  const std::string& output) {
  if (!seed_given) seed = disk::SeedFromEnvironment(seed);
  const disk::LinearSystem sys = disk::RandomStableSystem(dim, seed);
  const std::vector<disk::BlueRun> result = disk::RunBlueSimulation(sys, runs, steps, seed);
  std::ofstream file;
  if (!output.empty()) {
    const std::filesystem::path p(output);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    file.open(output, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + output);
  }
  std::ostream& out = output.empty() ? std::cout : file;
  out << std::setprecision(17) << "run,mse_raw,mse_kf\n";
  double raw = 0.0, kf = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (const auto& r : result) {
    out << r.run << ',' << r.mse_raw << ',' << r.mse_kf << '\n';
    raw += r.mse_raw;
    kf += r.mse_kf;
    min_eig = std::min(min_eig, r.min_covariance_eigenvalue);
  }
  std::cerr << "mean mse_raw " << raw / runs << ", mean mse_kf " << kf / runs
            << ", min eig(P) " << min_eig << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private optimization with Kalman-filtered gradients"};
  app.require_subcommand(1);

  Overrides train_o, compare_o, sweep_o, bounds_o;
  CLI::App* train = app.add_subcommand("train", "run one configuration and write traces");
  AddOverrides(train, train_o, true);

  CLI::App* compare = app.add_subcommand("compare-filters", "noisy GD vs low-pass vs DiSK");
  AddOverrides(compare, compare_o, false);
  std::vector<double> levels;
  bool absolute = false;
  compare->add_option("--noise-levels", levels, "noise levels (relative to |grad F(x0)|/sqrt(d))");
  compare->add_flag("--absolute", absolute, "treat noise levels as absolute sigma_dp values");

  CLI::App* sweep = app.add_subcommand("sweep", "(kappa, gamma) grid of DiSK runs");
  AddOverrides(sweep, sweep_o, false);
  std::vector<double> kappas, gammas;
  sweep->add_option("--kappas", kappas, "kappa grid");
  sweep->add_option("--gammas", gammas, "gamma grid");

  CLI::App* calibrate = app.add_subcommand("calibrate", "noise multiplier for a privacy budget");
  double c_eps = 0, c_delta = 0, c_q = 0, c_clip = 0;
  std::int64_t c_steps = 0;
  std::size_t c_batch = 0;
  calibrate->add_option("--epsilon", c_eps, "target epsilon")->required();
  calibrate->add_option("--delta", c_delta, "target delta")->required();
  calibrate->add_option("--sampling-rate", c_q, "q = B / N")->required();
  calibrate->add_option("--steps", c_steps, "number of steps T")->required();
  CLI::Option* clip_opt = calibrate->add_option("--clip", c_clip, "clipping threshold C");
  CLI::Option* batch_opt =
      calibrate->add_option("--batch-size", c_batch, "batch size B (sigma_dp = z C / B)");

  CLI::App* bounds = app.add_subcommand("bounds", "evaluate the convergence bounds");
  AddOverrides(bounds, bounds_o, true);
  std::string trace_path;
  bounds->add_option("--trace", trace_path, "trace CSV for the empirical left-hand side");

  CLI::App* kdemo = app.add_subcommand("kalman-demo", "Kalman filter vs raw observations");
  int k_runs = 50, k_steps = 10000, k_dim = 3;
  std::uint64_t k_seed = 0;
  std::string k_out;
  kdemo->add_option("--runs", k_runs, "Monte-Carlo runs");
  kdemo->add_option("--steps", k_steps, "steps per run");
  kdemo->add_option("--dim", k_dim, "state dimension");
  CLI::Option* k_seed_opt = kdemo->add_option("--seed", k_seed, "seed (default: DISK_SEED or 0)");
  kdemo->add_option("--output", k_out, "CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return RunTrain(train_o);
    if (*compare) return RunCompare(compare_o, levels, absolute);
    if (*sweep) return RunSweep(sweep_o, kappas, gammas);
    if (*calibrate) {
      return RunCalibrate(c_eps, c_delta, c_q, c_steps, clip_opt, c_clip, batch_opt, c_batch);
    }
    if (*bounds) return RunBounds(bounds_o, trace_path);
    if (*kdemo) return RunKalmanDemo(k_runs, k_steps, k_dim, k_seed, k_seed_opt->count() > 0, k_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
