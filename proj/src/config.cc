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

#include "disk/config.h"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace disk {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void ReadOptional(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

ObjectiveSpec ParseObjective(const json& j) {
  CheckKeys(j, "objective", {"kind", "num_samples", "dim", "noise_std", "eigenvalues",
                             "center_std", "mlp_hidden", "data_csv"});
  ObjectiveSpec s;
  if (j.contains("kind")) s.kind = ObjectiveKindFromString(j.at("kind").get<std::string>());
  Read(j, "num_samples", s.num_samples);
  Read(j, "dim", s.dim);
  Read(j, "noise_std", s.noise_std);
  Read(j, "eigenvalues", s.eigenvalues);
  Read(j, "center_std", s.center_std);
  Read(j, "mlp_hidden", s.mlp_hidden);
  Read(j, "data_csv", s.data_csv);
  return s;
}

DiskConfig ParseDisk(const json& j) {
  CheckKeys(j, "disk", {"kappa", "gamma", "lr", "clip", "clip_threshold", "base", "momentum",
                        "beta1", "beta2", "adam_eps", "weight_decay", "filter_init", "two_point",
                        "parallel"});
  DiskConfig d;
  Read(j, "kappa", d.kappa);
  Read(j, "gamma", d.gamma);
  Read(j, "lr", d.lr);
  if (j.contains("clip")) d.clip = ClipMethodFromString(j.at("clip").get<std::string>());
  Read(j, "clip_threshold", d.clip_threshold);
  if (j.contains("base")) d.base = BaseOptimizerFromString(j.at("base").get<std::string>());
  Read(j, "momentum", d.hyper.momentum);
  Read(j, "beta1", d.hyper.beta1);
  Read(j, "beta2", d.hyper.beta2);
  Read(j, "adam_eps", d.hyper.adam_eps);
  Read(j, "weight_decay", d.hyper.weight_decay);
  if (j.contains("filter_init")) {
    d.filter_init = FilterInitFromString(j.at("filter_init").get<std::string>());
  }
  Read(j, "two_point", d.two_point);
  Read(j, "parallel", d.parallel);
  return d;
}

ProblemConstants ParseConstants(const json& j) {
  CheckKeys(j, "constants", {"L", "f0_minus_fstar", "grad0_norm_sq", "sigma_sgd2", "G", "d"});
  ProblemConstants pc;
  Read(j, "L", pc.smoothness);
  Read(j, "f0_minus_fstar", pc.f0_minus_fstar);
  Read(j, "grad0_norm_sq", pc.grad0_norm_sq);
  Read(j, "sigma_sgd2", pc.sigma_sgd2);
  Read(j, "G", pc.grad_bound);
  Read(j, "d", pc.dim);
  return pc;
}

}  // namespace

RunConfig RunConfigFromJson(const json& j) {
  CheckKeys(j, "config", {"objective", "algorithm", "disk", "full_kf", "privacy", "sigma_dp",
                          "delta", "lr_over_smoothness", "steps", "batch_size", "seed",
                          "num_seeds", "init_std", "output_dir", "noise_levels",
                          "relative_noise", "kappas", "gammas", "constants"});
  RunConfig rc;
  ExperimentConfig& e = rc.experiment;
  if (j.contains("objective")) e.objective = ParseObjective(j.at("objective"));
  if (j.contains("algorithm")) e.algorithm = AlgorithmFromString(j.at("algorithm").get<std::string>());
  if (j.contains("disk")) e.disk = ParseDisk(j.at("disk"));
  if (j.contains("full_kf")) {
    const json& k = j.at("full_kf");
    CheckKeys(k, "full_kf", {"sigma_w2", "sigma_h2", "sigma_v2", "hessian_mode"});
    ReadOptional(k, "sigma_w2", e.kf_sigma_w2);
    Read(k, "sigma_h2", e.kf_sigma_h2);
    Read(k, "sigma_v2", e.kf_sigma_v2);
    if (k.contains("hessian_mode")) {
      e.kf_hessian_mode = HessianModeFromString(k.at("hessian_mode").get<std::string>());
    }
  }
  if (j.contains("privacy") && !j.at("privacy").is_null()) {
    const json& p = j.at("privacy");
    CheckKeys(p, "privacy", {"epsilon", "delta"});
    PrivacyBudget b;
    b.epsilon = p.at("epsilon").get<double>();
    b.delta = p.at("delta").get<double>();
    e.target = b;
  }
  ReadOptional(j, "sigma_dp", e.sigma_dp);
  ReadOptional(j, "delta", e.delta);
  ReadOptional(j, "lr_over_smoothness", e.lr_over_smoothness);
  Read(j, "steps", e.steps);
  Read(j, "batch_size", e.batch_size);
  Read(j, "seed", e.seed);
  Read(j, "num_seeds", e.num_seeds);
  ReadOptional(j, "init_std", e.init_std);
  Read(j, "output_dir", e.output_dir);
  Read(j, "noise_levels", rc.noise_levels);
  Read(j, "relative_noise", rc.relative_noise);
  Read(j, "kappas", rc.kappas);
  Read(j, "gammas", rc.gammas);
  if (j.contains("constants") && !j.at("constants").is_null()) {
    rc.constants = ParseConstants(j.at("constants"));
  }
  return rc;
}

json ToJson(const RunConfig& rc) {
  const ExperimentConfig& e = rc.experiment;
  json j;
  j["objective"] = {{"kind", std::string(ToString(e.objective.kind))},
                    {"num_samples", e.objective.num_samples},
                    {"dim", e.objective.dim},
                    {"noise_std", e.objective.noise_std},
                    {"eigenvalues", e.objective.eigenvalues},
                    {"center_std", e.objective.center_std},
                    {"mlp_hidden", e.objective.mlp_hidden},
                    {"data_csv", e.objective.data_csv}};
  j["algorithm"] = std::string(ToString(e.algorithm));
  j["disk"] = {{"kappa", e.disk.kappa},
               {"gamma", e.disk.gamma},
               {"lr", e.disk.lr},
               {"clip", std::string(ToString(e.disk.clip))},
               {"clip_threshold", e.disk.clip_threshold},
               {"base", std::string(ToString(e.disk.base))},
               {"momentum", e.disk.hyper.momentum},
               {"beta1", e.disk.hyper.beta1},
               {"beta2", e.disk.hyper.beta2},
               {"adam_eps", e.disk.hyper.adam_eps},
               {"weight_decay", e.disk.hyper.weight_decay},
               {"filter_init", std::string(ToString(e.disk.filter_init))},
               {"two_point", e.disk.two_point},
               {"parallel", e.disk.parallel}};
  j["full_kf"] = {{"sigma_h2", e.kf_sigma_h2},
                  {"sigma_v2", e.kf_sigma_v2},
                  {"hessian_mode", std::string(ToString(e.kf_hessian_mode))}};
  if (e.kf_sigma_w2) j["full_kf"]["sigma_w2"] = *e.kf_sigma_w2;
  if (e.target) j["privacy"] = {{"epsilon", e.target->epsilon}, {"delta", e.target->delta}};
  if (e.sigma_dp) j["sigma_dp"] = *e.sigma_dp;
  if (e.delta) j["delta"] = *e.delta;
  if (e.lr_over_smoothness) j["lr_over_smoothness"] = *e.lr_over_smoothness;
  j["steps"] = e.steps;
  j["batch_size"] = e.batch_size;
  j["seed"] = e.seed;
  j["num_seeds"] = e.num_seeds;
  if (e.init_std) j["init_std"] = *e.init_std;
  j["output_dir"] = e.output_dir;
  j["noise_levels"] = rc.noise_levels;
  j["relative_noise"] = rc.relative_noise;
  j["kappas"] = rc.kappas;
  j["gammas"] = rc.gammas;
  if (rc.constants) {
    const ProblemConstants& pc = *rc.constants;
    j["constants"] = {{"L", pc.smoothness},          {"f0_minus_fstar", pc.f0_minus_fstar},
                      {"grad0_norm_sq", pc.grad0_norm_sq}, {"sigma_sgd2", pc.sigma_sgd2},
                      {"G", pc.grad_bound},          {"d", pc.dim}};
  }
  return j;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

}  // namespace disk
