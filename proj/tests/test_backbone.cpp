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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "spoofkit/backbone.hpp"
#include "testutil.hpp"

using namespace spoofkit;
using testutil::finite_diff_check;

TEST_CASE("zero conv weights reduce a block to the channel-projected skip") {
  Parameters P;
  ResnetBlock block;
  Rng rng(1);
  block.init(P, rng, "backbone.block1", 2, 3, 1, 1);
  for (auto name : {"backbone.block1.conv1.weight", "backbone.block1.conv1.bias",
                    "backbone.block1.conv2.weight", "backbone.block1.conv2.bias",
                    "backbone.block1.norm1.beta", "backbone.block1.norm2.beta"})
    P.value(name) = Tensor::zeros(P.value(name).shape());

  Graph g;
  FwdCtx ctx(g, P);
  Tensor x = Tensor::randn({2, 5, 4}, rng);
  const Tensor& out = g.val(block.forward(ctx, g.leaf(x)));
  REQUIRE(out.shape() == std::vector<int>{3, 5, 4});

  const Tensor& skip_w = P.value("backbone.block1.skip.weight");  // (3,2,1,1)
  for (int co = 0; co < 3; ++co)
    for (int f = 0; f < 5; ++f)
      for (int t = 0; t < 4; ++t) {
        double want = 0;
        for (int ci = 0; ci < 2; ++ci) want += skip_w[co * 2 + ci] * x.at(ci, f, t);
        CHECK(out.at(co, f, t) == doctest::Approx(want).epsilon(1e-12));
      }
}

TEST_CASE("identity block with matching channels returns its input exactly") {
  Parameters P;
  ResnetBlock block;
  Rng rng(2);
  block.init(P, rng, "b", 3, 3, 1, 1);
  for (auto name : {"b.conv1.weight", "b.conv1.bias", "b.conv2.weight", "b.conv2.bias",
                    "b.norm1.beta", "b.norm2.beta"})
    P.value(name) = Tensor::zeros(P.value(name).shape());
  Graph g;
  FwdCtx ctx(g, P);
  Tensor x = Tensor::randn({3, 4, 6}, rng);
  const Tensor& out = g.val(block.forward(ctx, g.leaf(x)));
  for (int64_t i = 0; i < x.size(); ++i) CHECK(out[i] == x[i]);
}

TEST_CASE("default configuration traces (1,128,50) to (64,16,25)") {
  Parameters P;
  Backbone bb;
  Rng rng(3);
  bb.build(P, BackboneConfig{}, 1, rng);
  Graph g;
  FwdCtx ctx(g, P);
  Graph::NodeId out = bb.encode(ctx, g.leaf(Tensor::randn({1, 128, 50}, rng)));
  CHECK(g.val(out).shape() == std::vector<int>{64, 16, 25});
}

TEST_CASE("pooling collapse raises a config error naming the block") {
  Parameters P;
  Backbone bb;
  Rng rng(4);
  bb.build(P, BackboneConfig{}, 1, rng);
  Graph g;
  FwdCtx ctx(g, P);
  // freq 2 survives block2 (2/2=1) but dies at block4
  CHECK_THROWS_WITH_AS(bb.encode(ctx, g.leaf(Tensor::randn({1, 2, 50}, rng))),
                       doctest::Contains("block4"), ConfigError);
}

TEST_CASE("all-zero input flows through the bias path only") {
  Parameters P;
  Backbone bb;
  Rng rng(5);
  BackboneConfig cfg;
  cfg.block_channels = {4, 4, 6, 6, 8, 8};
  bb.build(P, cfg, 1, rng);
  // give conv biases some life so the bias path is non-trivial
  for (const auto& name : P.names())
    if (name.find(".bias") != std::string::npos) {
      Rng brng(hash_str(name));
      P.value(name) = Tensor::randn(P.value(name).shape(), brng, 0.3);
    }
  auto run = [&]() {
    Graph g;
    FwdCtx ctx(g, P);
    return g.val(bb.encode(ctx, g.leaf(Tensor::zeros({1, 32, 16}))));
  };
  Tensor with_weights = run();
  // zero input: the weights that multiply the input must be inert
  P.value("backbone.block1.conv1.weight") = Tensor::zeros(P.value("backbone.block1.conv1.weight").shape());
  P.value("backbone.block1.skip.weight") = Tensor::zeros(P.value("backbone.block1.skip.weight").shape());
  Tensor bias_only = run();
  REQUIRE(with_weights.size() == bias_only.size());
  for (int64_t i = 0; i < with_weights.size(); ++i) CHECK(with_weights[i] == bias_only[i]);
}

TEST_CASE("bifurcate: constant input gives constant node sets") {
  Parameters P;
  Backbone bb;
  Rng rng(6);
  BackboneConfig cfg;
  cfg.node_dim = 8;
  bb.build(P, cfg, 1, rng);
  Graph g;
  FwdCtx ctx(g, P);
  Graph::NodeId fm = g.leaf(Tensor::full({64, 6, 5}, 1.7));
  auto [spec, temp] = bb.bifurcate(ctx, fm);
  CHECK(spec.modality == Modality::kSpectral);
  CHECK(temp.modality == Modality::kTemporal);
  const Tensor& sv = g.val(spec.id);
  const Tensor& tv = g.val(temp.id);
  REQUIRE(sv.shape() == std::vector<int>{6, 8});
  REQUIRE(tv.shape() == std::vector<int>{5, 8});
  for (int i = 1; i < 6; ++i)
    for (int j = 0; j < 8; ++j) CHECK(sv.at(i, j) == doctest::Approx(sv.at(0, j)).epsilon(1e-12));
  for (int i = 1; i < 5; ++i)
    for (int j = 0; j < 8; ++j) CHECK(tv.at(i, j) == doctest::Approx(tv.at(0, j)).epsilon(1e-12));
}

TEST_CASE("bifurcate places a spike at the right node pre-projection") {
  Graph g;
  Tensor f = Tensor::zeros({3, 4, 6});
  f.at(2, 1, 4) = 5.0;  // channel 2, frequency 1, time 4
  Graph::NodeId fm = g.leaf(f);
  const Tensor& spec = g.val(g.max_over_time(fm));  // (F, C)
  const Tensor& temp = g.val(g.max_over_freq(fm));  // (T, C)
  CHECK(spec.at(1, 2) == 5.0);
  CHECK(temp.at(4, 2) == 5.0);
  CHECK(spec.at(0, 2) == 0.0);
  CHECK(temp.at(0, 2) == 0.0);
}

TEST_CASE("permuting time permutes temporal nodes and fixes spectral nodes") {
  Rng rng(7);
  Tensor f = Tensor::randn({3, 4, 5}, rng);
  std::vector<int> perm{3, 0, 4, 1, 2};
  Tensor fp({3, 4, 5});
  for (int c = 0; c < 3; ++c)
    for (int fr = 0; fr < 4; ++fr)
      for (int t = 0; t < 5; ++t) fp.at(c, fr, t) = f.at(c, fr, perm[static_cast<size_t>(t)]);
  Graph g;
  const Tensor& spec_a = g.val(g.max_over_time(g.leaf(f)));
  const Tensor& spec_b = g.val(g.max_over_time(g.leaf(fp)));
  for (int64_t i = 0; i < spec_a.size(); ++i) CHECK(spec_a[i] == spec_b[i]);
  const Tensor& temp_a = g.val(g.max_over_freq(g.leaf(f)));
  const Tensor& temp_b = g.val(g.max_over_freq(g.leaf(fp)));
  for (int t = 0; t < 5; ++t)
    for (int c = 0; c < 3; ++c) CHECK(temp_b.at(t, c) == temp_a.at(perm[static_cast<size_t>(t)], c));
}

TEST_CASE("positive scaling scales pre-projection node values") {
  Rng rng(8);
  Tensor f = Tensor::randn({2, 3, 4}, rng);
  Tensor fs = f;
  for (int64_t i = 0; i < fs.size(); ++i) fs[i] *= 2.5;
  Graph g;
  const Tensor& a = g.val(g.max_over_time(g.leaf(f)));
  const Tensor& b = g.val(g.max_over_time(g.leaf(fs)));
  for (int64_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(2.5 * a[i]).epsilon(1e-12));
}

TEST_CASE("resnet block gradients match finite differences") {
  Parameters P;
  ResnetBlock block;
  Rng rng(9);
  block.init(P, rng, "b", 2, 3, 1, 1);
  Tensor x = Tensor::randn({2, 5, 4}, rng);
  Tensor w = Tensor::randn({3, 5, 4}, rng);
  auto check = finite_diff_check(P, [&](FwdCtx& ctx) {
    return ctx.g.weighted_sum(block.forward(ctx, ctx.g.leaf(x)), w);
  });
  CHECK(check.max_rel_err < 1e-4);
}

TEST_CASE("bifurcate projection gradients match finite differences") {
  Parameters P;
  Backbone bb;
  Rng rng(10);
  BackboneConfig cfg;
  cfg.block_channels = {2, 2, 2, 2, 2, 3};
  cfg.node_dim = 4;
  bb.build(P, cfg, 1, rng);
  Tensor fmap = Tensor::randn({3, 4, 5}, rng);
  Tensor ws = Tensor::randn({4, 4}, rng);
  Tensor wt = Tensor::randn({5, 4}, rng);
  // restrict to the projection parameters: the input feature map is a leaf
  Parameters proj;
  proj.declare("backbone.bifurcate.spectral_proj.weight", P.value("backbone.bifurcate.spectral_proj.weight"));
  proj.declare("backbone.bifurcate.spectral_proj.bias", P.value("backbone.bifurcate.spectral_proj.bias"));
  proj.declare("backbone.bifurcate.temporal_proj.weight", P.value("backbone.bifurcate.temporal_proj.weight"));
  proj.declare("backbone.bifurcate.temporal_proj.bias", P.value("backbone.bifurcate.temporal_proj.bias"));
  auto check = finite_diff_check(proj, [&](FwdCtx& ctx) {
    Graph& g = ctx.g;
    Graph::NodeId spec = g.add_row_broadcast(
        g.matmul(g.max_over_time(g.leaf(fmap)), ctx.use("backbone.bifurcate.spectral_proj.weight")),
        ctx.use("backbone.bifurcate.spectral_proj.bias"));
    Graph::NodeId temp = g.add_row_broadcast(
        g.matmul(g.max_over_freq(g.leaf(fmap)), ctx.use("backbone.bifurcate.temporal_proj.weight")),
        ctx.use("backbone.bifurcate.temporal_proj.bias"));
    return g.add(g.weighted_sum(spec, ws), g.weighted_sum(temp, wt));
  });
  CHECK(check.max_rel_err < 1e-4);
}
