// Copyright 2026 Spoofkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spoofkit {

// splitmix64 finalizer. All seed derivation in the project funnels through
// mix_seed()/hash_str() so that derived streams are reproducible across
// processes and platforms.
uint64_t splitmix64(uint64_t x);

// Combines a base seed with a tag into a new seed.
uint64_t mix_seed(uint64_t base, uint64_t tag);

// FNV-1a over the bytes of a string.
uint64_t hash_str(std::string_view s);

// seed for the per-utterance augmentation/crop stream:
// mix(mix(global_seed, fnv1a(utterance_id)), epoch)
uint64_t utterance_seed(uint64_t global_seed, std::string_view utterance_id, int epoch);

// mt19937_64 with hand-rolled distributions. std::uniform_real_distribution
// is not bit-portable across standard libraries; these are.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derived independent stream.
  Rng split(uint64_t tag) { return Rng(mix_seed(engine_(), tag)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spoofkit
