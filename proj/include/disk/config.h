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

#ifndef DISK_CONFIG_H_
#define DISK_CONFIG_H_

#include <optional>
#include <string>
#include <vector>

#include "disk/harness.h"
#include "disk/theory.h"
#include "json.hpp"

namespace disk {

// Everything a CLI invocation can read from a JSON file.
struct RunConfig {
  ExperimentConfig experiment;
  // compare-filters
  std::vector<double> noise_levels = {0.01, 0.03, 0.1, 0.3, 1.0};
  bool relative_noise = true;
  // sweep
  std::vector<double> kappas = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<double> gammas = {-1.0, -0.5, 0.5, 1.0, 2.0};
  // bounds: explicit problem constants; derived from the objective when absent.
  std::optional<ProblemConstants> constants;
};

// Unknown keys are rejected so that typos do not silently fall back to
// defaults. Missing keys keep their defaults.
RunConfig RunConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const RunConfig& cfg);
RunConfig LoadRunConfig(const std::string& path);

}  // namespace disk

#endif  // DISK_CONFIG_H_
