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

#include <array>

#include "spoofkit/nn.hpp"

namespace spoofkit {

enum class Modality { kSpectral, kTemporal, kMixed };

// N x d node embeddings tagged with where they came from.
struct NodeSet {
  Tensor nodes;  // (N, d)
  Modality modality = Modality::kMixed;
};

// In-graph counterpart used while building a forward pass.
struct NodeSetVar {
  Graph::NodeId id = -1;
  Modality modality = Modality::kMixed;
};

struct BackboneConfig {
  std::array<int, 6> block_channels{16, 16, 24, 24, 32, 64};
  // pool factor per block (1 = none); defaults trace (1,128,T) to (64,16,T/2)
  std::array<int, 6> freq_pool{1, 2, 1, 2, 1, 2};
  std::array<int, 6> time_pool{1, 1, 1, 2, 1, 1};
  int node_dim = 64;

  void validate() const;
};

// conv-norm-GELU-conv-norm + skip (1x1 projection when channels change),
// then optional max pooling. No activation after the residual add.
struct ResnetBlock {
  std::string prefix;
  int in_ch = 0, out_ch = 0, pool_f = 1, pool_t = 1;
  std::string conv1_w, conv1_b, norm1_g, norm1_b;
  std::string conv2_w, conv2_b, norm2_g, norm2_b;
  std::string skip_w;  // empty when in_ch == out_ch

  void init(Parameters& P, Rng& rng, const std::string& prefix, int in_channels, int out_channels,
            int pool_freq, int pool_time);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId x) const;
};

class Backbone {
 public:
  void build(Parameters& P, const BackboneConfig& cfg, int in_channels, Rng& rng);

  // (C_in, F, T) -> (block_channels[5], F', T'); throws ConfigError naming
  // the offending block if pooling collapses a spatial dim to zero.
  Graph::NodeId encode(FwdCtx& ctx, Graph::NodeId feature_map) const;

  // max over time -> F' spectral nodes, max over frequency -> T' temporal
  // nodes, each projected to node_dim.
  std::pair<NodeSetVar, NodeSetVar> bifurcate(FwdCtx& ctx, Graph::NodeId feature_map) const;

  const BackboneConfig& config() const { return cfg_; }

 private:
  BackboneConfig cfg_;
  std::array<ResnetBlock, 6> blocks_;
  Linear spectral_proj_, temporal_proj_;
};

}  // namespace spoofkit
