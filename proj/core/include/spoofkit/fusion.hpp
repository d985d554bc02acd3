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

#include "spoofkit/attention.hpp"

namespace spoofkit {

enum class FusionStrategy { kMax, kAttention };

struct FusionConfig {
  FusionStrategy strategy = FusionStrategy::kAttention;
  int num_heads = 4;
};

// Element-wise dominant activation of two shape-identical branches.
NodeSetVar max_fusion(Graph& g, const NodeSetVar& a, const NodeSetVar& b);

// Learnable drop-in replacement: one self-attention block over the
// [spectral; temporal] concatenation; preserves (N_s + N_t, d).
struct AttentionFusion {
  MhaBlock block;

  void init(Parameters& P, Rng& rng, int d, int num_heads);
  NodeSetVar forward(FwdCtx& ctx, const NodeSetVar& spectral, const NodeSetVar& temporal,
                     AttentionTrace* trace = nullptr) const;
};

// max-pool ++ mean-pool over the fused node set, plus the stack node state
// when present: e = 2d (+d).
Graph::NodeId readout(Graph& g, const NodeSetVar& fused, Graph::NodeId stack = -1);

struct Classifier {
  Linear head;

  void init(Parameters& P, Rng& rng, int embedding_dim);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId utterance_embedding) const;  // (e,) -> (2,)
};

// bonafide-vs-spoof detection score from the two logits
double detection_score(const Tensor& logits);

}  // namespace spoofkit
