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

#include "disk/rng.h"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace disk {
namespace {

// 64-bit FNV-1a.
std::uint64_t HashName(std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Rng MakeStream(std::uint64_t master_seed, std::string_view name) {
  const std::uint64_t h = HashName(name);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

std::uint64_t SeedFromEnvironment(std::uint64_t fallback) {
  const char* value = std::getenv("DISK_SEED");
  if (value == nullptr || *value == '\0') return fallback;
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("DISK_SEED is not an unsigned integer: ") + value);
  }
}

}  // namespace disk
