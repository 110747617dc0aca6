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

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "disk/objectives.h"

namespace disk {

MinibatchSampler::MinibatchSampler(std::size_t dataset_size, std::size_t batch_size,
                                   std::uint64_t seed)
    : dataset_size_(dataset_size),
      batch_size_(batch_size),
      rng_(MakeStream(seed, kSamplingStream)),
      permutation_(dataset_size) {
  if (dataset_size_ == 0) throw std::invalid_argument("sampler: empty dataset");
  if (batch_size_ == 0 || batch_size_ > dataset_size_) {
    throw std::invalid_argument("sampler: batch size must be in [1, N]");
  }
  std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
  Reshuffle();
}

void MinibatchSampler::Reshuffle() {
  std::shuffle(permutation_.begin(), permutation_.end(), rng_);
  cursor_ = 0;
}

std::span<const std::size_t> MinibatchSampler::Next() {
  if (cursor_ + batch_size_ > batches_per_epoch() * batch_size_) Reshuffle();
  std::span<const std::size_t> batch(permutation_.data() + cursor_, batch_size_);
  cursor_ += batch_size_;
  return batch;
}

}  // namespace disk
