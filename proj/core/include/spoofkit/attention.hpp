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

#include <optional>
#include <vector>

#include "spoofkit/backbone.hpp"

namespace spoofkit {

enum class AttentionFormalism { kPairwiseGat, kMha };

struct AttentionConfig {
  AttentionFormalism formalism = AttentionFormalism::kMha;
  int num_heads = 4;
  double dropout = 0.1;
  bool stack_node = true;

  void validate(int node_dim) const;  // num_heads must divide node_dim
};

// Post-softmax attention maps captured during a forward pass, for
// inspection and tests. One (N,N) matrix per head (single entry for the
// pairwise operator).
struct AttentionTrace {
  std::vector<Tensor> head_attention;
};

// Fully-connected pairwise graph attention over one branch:
//   S_ij = sum_k a_k * x_i[k] * x_j[k],  A = softmax_j(S),
//   out_i = x_i + gelu(A_i . (X Wv + bv))
struct PairwiseGat {
  std::string att_vec, v_w, v_b;
  int dim = 0;

  void init(Parameters& P, Rng& rng, const std::string& prefix, int d);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId x, AttentionTrace* trace = nullptr) const;
};

// Canonical pre-norm multi-head self-attention block with residual,
// normalization and a GELU feed-forward sublayer. Shape preserving.
struct MhaBlock {
  LayerNorm ln1, ln2;
  Linear q, k, v, out;
  Linear ff1, ff2;
  int dim = 0, heads = 1;

  void init(Parameters& P, Rng& rng, const std::string& prefix, int d, int num_heads, int ff_dim = 0);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId x, AttentionTrace* trace = nullptr) const;
};

// Type-aware variant: joint attention over [temporal; spectral; stack] where
// queries/keys use per-type projections and values share one projection.
// Shares the MhaBlock skeleton so tying the typed projections makes it
// bitwise identical to MhaBlock on the concatenated set.
struct HeteroMha {
  LayerNorm ln1, ln2;
  Linear q_temporal, q_spectral, q_stack;
  Linear k_temporal, k_spectral, k_stack;
  Linear v_shared, out;
  Linear ff1, ff2;
  int dim = 0, heads = 1;
  bool has_stack = false;

  void init(Parameters& P, Rng& rng, const std::string& prefix, int d, int num_heads, bool stack_node,
            int ff_dim = 0);

  struct Result {
    NodeSetVar temporal;
    NodeSetVar spectral;
    Graph::NodeId stack = -1;  // updated stack state when enabled
  };
  // stack_in must be a (1,d) node id when has_stack, -1 otherwise.
  Result forward(FwdCtx& ctx, const NodeSetVar& temporal, const NodeSetVar& spectral,
                 Graph::NodeId stack_in, AttentionTrace* trace = nullptr) const;
};

// Learned-gate top-k pooling: keeps the highest-scoring nodes (stable by
// node index on ties) and multiplies them by their sigmoid gate.
struct GraphPool {
  std::string gate_w, gate_b;
  int dim = 0;

  void init(Parameters& P, Rng& rng, const std::string& prefix, int d);
  // keep_count <= 0 means derive it as ceil(keep_ratio * N).
  NodeSetVar forward(FwdCtx& ctx, const NodeSetVar& nodes, double keep_ratio, int keep_count = 0) const;
};

// top-k selection used by GraphPool, exposed for the sort-oracle tests:
// indices of the k best scores, descending by score, ties by lower index,
// returned in ascending index order.
std::vector<int> top_k_stable(const Tensor& scores, int k);

}  // namespace spoofkit
