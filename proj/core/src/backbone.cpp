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

#include "spoofkit/backbone.hpp"

namespace spoofkit {

void BackboneConfig::validate() const {
  for (int c : block_channels)
    if (c < 1) throw ConfigError("backbone.block_channels must all be >= 1");
  for (int p : freq_pool)
    if (p < 1) throw ConfigError("backbone.freq_pool factors must be >= 1");
  for (int p : time_pool)
    if (p < 1) throw ConfigError("backbone.time_pool factors must be >= 1");
  if (node_dim < 1) throw ConfigError("backbone.node_dim must be >= 1");
}

void ResnetBlock::init(Parameters& P, Rng& rng, const std::string& pfx, int in_channels,
                       int out_channels, int pool_freq, int pool_time) {
  prefix = pfx;
  in_ch = in_channels;
  out_ch = out_channels;
  pool_f = pool_freq;
  pool_t = pool_time;
  conv1_w = pfx + ".conv1.weight";
  conv1_b = pfx + ".conv1.bias";
  norm1_g = pfx + ".norm1.gamma";
  norm1_b = pfx + ".norm1.beta";
  conv2_w = pfx + ".conv2.weight";
  conv2_b = pfx + ".conv2.bias";
  norm2_g = pfx + ".norm2.gamma";
  norm2_b = pfx + ".norm2.beta";
  P.declare(conv1_w, Tensor::xavier({out_channels, in_channels, 3, 3}, rng));
  P.declare(conv1_b, Tensor::zeros({out_channels}));
  P.declare(norm1_g, Tensor::full({out_channels}, 1.0));
  P.declare(norm1_b, Tensor::zeros({out_channels}));
  P.declare(conv2_w, Tensor::xavier({out_channels, out_channels, 3, 3}, rng));
  P.declare(conv2_b, Tensor::zeros({out_channels}));
  P.declare(norm2_g, Tensor::full({out_channels}, 1.0));
  P.declare(norm2_b, Tensor::zeros({out_channels}));
  if (in_channels != out_channels) {
    skip_w = pfx + ".skip.weight";
    // 1x1 channel projection, no bias
    P.declare(skip_w, Tensor::xavier({out_channels, in_channels, 1, 1}, rng));
  } else {
    skip_w.clear();
  }
}

namespace {

// 1x1 conv as an explicit matmul over channels: (Ci,F,T) -> (Co,F,T)
Graph::NodeId conv1x1(FwdCtx& ctx, Graph::NodeId x, Graph::NodeId w, int ci, int co) {
  const Tensor& X = ctx.g.val(x);
  int f = X.dim(1), t = X.dim(2);
  Graph::NodeId flat = ctx.g.reshape(x, {ci, f * t});       // (Ci, FT)
  Graph::NodeId wm = ctx.g.reshape(w, {co, ci});            // (Co, Ci)
  Graph::NodeId out = ctx.g.matmul(wm, flat);               // (Co, FT)
  return ctx.g.reshape(out, {co, f, t});
}

}  // namespace

Graph::NodeId ResnetBlock::forward(FwdCtx& ctx, Graph::NodeId x) const {
  Graph& g = ctx.g;
  Graph::NodeId h = g.conv2d_3x3(x, ctx.use(conv1_w), ctx.use(conv1_b));
  h = g.instance_norm(h, ctx.use(norm1_g), ctx.use(norm1_b));
  h = g.gelu(h);
  h = g.conv2d_3x3(h, ctx.use(conv2_w), ctx.use(conv2_b));
  h = g.instance_norm(h, ctx.use(norm2_g), ctx.use(norm2_b));
  Graph::NodeId skip = skip_w.empty() ? x : conv1x1(ctx, x, ctx.use(skip_w), in_ch, out_ch);
  Graph::NodeId out = g.add(h, skip);
  if (pool_f > 1 || pool_t > 1) {
    const Tensor& v = g.val(out);
    if (v.dim(1) / pool_f < 1 || v.dim(2) / pool_t < 1)
      throw ConfigError("backbone " + prefix + ": pooling collapses spatial dims to zero (input " +
                        std::to_string(v.dim(1)) + "x" + std::to_string(v.dim(2)) + ")");
    out = g.maxpool2d(out, pool_f, pool_t);
  }
  return out;
}

void Backbone::build(Parameters& P, const BackboneConfig& cfg, int in_channels, Rng& rng) {
  cfg.validate();
  cfg_ = cfg;
  int ci = in_channels;
  for (int b = 0; b < 6; ++b) {
    blocks_[static_cast<size_t>(b)].init(P, rng, "backbone.block" + std::to_string(b + 1), ci,
                                         cfg.block_channels[static_cast<size_t>(b)],
                                         cfg.freq_pool[static_cast<size_t>(b)],
                                         cfg.time_pool[static_cast<size_t>(b)]);
    ci = cfg.block_channels[static_cast<size_t>(b)];
  }
  spectral_proj_.init(P, rng, "backbone.bifurcate.spectral_proj", ci, cfg.node_dim);
  temporal_proj_.init(P, rng, "backbone.bifurcate.temporal_proj", ci, cfg.node_dim);
}

Graph::NodeId Backbone::encode(FwdCtx& ctx, Graph::NodeId feature_map) const {
  Graph::NodeId h = feature_map;
  for (const auto& block : blocks_) h = block.forward(ctx, h);
  return h;
}

std::pair<NodeSetVar, NodeSetVar> Backbone::bifurcate(FwdCtx& ctx, Graph::NodeId feature_map) const {
  Graph::NodeId spec = spectral_proj_.forward(ctx, ctx.g.max_over_time(feature_map));
  Graph::NodeId temp = temporal_proj_.forward(ctx, ctx.g.max_over_freq(feature_map));
  return {NodeSetVar{spec, Modality::kSpectral}, NodeSetVar{temp, Modality::kTemporal}};
}

}  // namespace spoofkit
