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

#ifndef DISK_RNG_H_
#define DISK_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace disk {

using Rng = std::mt19937_64;

// Names of the independent sub-streams derived from a run's master seed.
inline constexpr std::string_view kDataStream = "data";
inline constexpr std::string_view kSamplingStream = "sampling";
inline constexpr std::string_view kNoiseStream = "dp_noise";
inline constexpr std::string_view kInitStream = "init";

// Derives a reproducible generator for `name` from `master_seed`. Distinct
// names give statistically independent streams; the mapping is stable across
// runs and platforms.
Rng MakeStream(std::uint64_t master_seed, std::string_view name);

// Reads DISK_SEED from the environment if set, otherwise returns `fallback`.
std::uint64_t SeedFromEnvironment(std::uint64_t fallback);

}  // namespace disk

#endif  // DISK_RNG_H_
