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

#include "spoofkit/metrics.hpp"
#include "spoofkit/rng.hpp"

namespace {

spoofkit::ScoreSet make_scores(int n) {
  spoofkit::Rng rng(42);
  spoofkit::ScoreSet s;
  for (int i = 0; i < n; ++i)
    s.records.push_back({"u" + std::to_string(i), rng.normal() + (i % 2 ? 0.5 : -0.5),
                         i % 2 ? spoofkit::Label::kBonafide : spoofkit::Label::kSpoof});
  return s;
}

void BM_ComputeEer(benchmark::State& state) {
  auto scores = make_scores(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = spoofkit::compute_eer(scores);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_ComputeEer)->RangeMultiplier(4)->Range(64, 16384)->Complexity();
