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

#include "spoofkit/attention.hpp"

namespace {

using namespace spoofkit;

void BM_MhaForward(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  int d = 64;
  Parameters P;
  MhaBlock mha;
  Rng rng(1);
  mha.init(P, rng, "m", d, 4);
  Tensor x = Tensor::randn({n, d}, rng);
  for (auto _ : state) {
    Graph g;
    FwdCtx ctx(g, P);
    auto out = mha.forward(ctx, g.leaf(x));
    benchmark::DoNotOptimize(g.val(out).data());
  }
}

void BM_MhaForwardBackward(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  int d = 64;
  Parameters P;
  MhaBlock mha;
  Rng rng(1);
  mha.init(P, rng, "m", d, 4);
  Tensor x = Tensor::randn({n, d}, rng);
  Tensor w = Tensor::randn({n, d}, rng);
  for (auto _ : state) {
    Graph g;
    FwdCtx ctx(g, P, /*training=*/true);
    Graph::NodeId loss = g.weighted_sum(mha.forward(ctx, g.leaf(x)), w);
    g.backward(loss);
    benchmark::DoNotOptimize(g.grad(loss).data());
  }
}

void BM_PairwiseGat(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  int d = 64;
  Parameters P;
  PairwiseGat gat;
  Rng rng(2);
  gat.init(P, rng, "g", d);
  Tensor x = Tensor::randn({n, d}, rng);
  for (auto _ : state) {
    Graph g;
    FwdCtx ctx(g, P);
    auto out = gat.forward(ctx, g.leaf(x));
    benchmark::DoNotOptimize(g.val(out).data());
  }
}

}  // namespace

BENCHMARK(BM_MhaForward)->Arg(16)->Arg(41)->Arg(128);
BENCHMARK(BM_MhaForwardBackward)->Arg(16)->Arg(41);
BENCHMARK(BM_PairwiseGat)->Arg(16)->Arg(41)->Arg(128);
