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

#include <benchmark/benchmark.h>

#include "spoofkit/augment.hpp"
#include "spoofkit/rawboost.hpp"

namespace {

using namespace spoofkit;

Waveform one_second_noise() {
  Rng rng(3);
  Waveform w;
  w.id = "bench";
  w.samples.resize(16000);
  for (auto& v : w.samples) v = static_cast<float>(0.4 * (2.0 * rng.uniform() - 1.0));
  return w;
}

void BM_EffectChain(benchmark::State& state) {
  Waveform w = one_second_noise();
  EffectChainConfig cfg;
  uint64_t seed = 0;
  for (auto _ : state) {
    AugmentationState st{0.9, 1.8, Rng(seed++)};
    Waveform out = apply_effect_chain(w, st, cfg);
    benchmark::DoNotOptimize(out.samples.data());
  }
}

void BM_CodecCorruption(benchmark::State& state) {
  Waveform w = one_second_noise();
  CodecConfig cfg;
  uint64_t seed = 0;
  for (auto _ : state) {
    AugmentationState st{0.9, 1.8, Rng(seed++)};
    Waveform out = apply_codec_corruption(w, st, cfg);
    benchmark::DoNotOptimize(out.samples.data());
  }
}

void BM_RawBoost(benchmark::State& state) {
  Waveform w = one_second_noise();
  RawBoostParams p;
  p.variant = static_cast<int>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    Waveform out = rawboost(w, p, seed++);
    benchmark::DoNotOptimize(out.samples.data());
  }
}

}  // namespace

BENCHMARK(BM_EffectChain);
BENCHMARK(BM_CodecCorruption);
BENCHMARK(BM_RawBoost)->Arg(1)->Arg(3)->Arg(7)->Arg(8);
