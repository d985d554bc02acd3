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

#include "spoofkit/fusion.hpp"

namespace spoofkit {

NodeSetVar max_fusion(Graph& g, const NodeSetVar& a, const NodeSetVar& b) {
  if (!g.val(a.id).same_shape(g.val(b.id)))
    throw UsageError("max_fusion requires shape-identical branches");
  return NodeSetVar{g.max_elem(a.id, b.id), Modality::kMixed};
}

void AttentionFusion::init(Parameters& P, Rng& rng, int d, int num_heads) {
  if (num_heads < 1) throw ConfigError("fusion.num_heads must be >= 1");
  if (d % num_heads != 0) throw ConfigError("fusion.num_heads must divide node_dim");
  block.init(P, rng, "attention.fusion", d, num_heads);
}

NodeSetVar AttentionFusion::forward(FwdCtx& ctx, const NodeSetVar& spectral, const NodeSetVar& temporal,
                                    AttentionTrace* trace) const {
  Graph::NodeId joint = ctx.g.concat_rows({spectral.id, temporal.id});
  return NodeSetVar{block.forward(ctx, joint, trace), Modality::kMixed};
}

Graph::NodeId readout(Graph& g, const NodeSetVar& fused, Graph::NodeId stack) {
  if (g.val(fused.id).dim(0) < 1) throw UsageError("readout: empty node set");
  std::vector<Graph::NodeId> parts{g.col_max(fused.id), g.col_mean(fused.id)};
  if (stack >= 0) {
    int d = g.val(stack).dim(1);
    parts.push_back(g.reshape(stack, {d}));
  }
  return g.concat_vec(parts);
}

void Classifier::init(Parameters& P, Rng& rng, int embedding_dim) {
  head.init(P, rng, "classifier", embedding_dim, 2);
}

Graph::NodeId Classifier::forward(FwdCtx& ctx, Graph::NodeId utterance_embedding) const {
  const Tensor& u = ctx.g.val(utterance_embedding);
  if (u.rank() != 1 || u.dim(0) != head.in)
    throw ConfigError("classifier input dim mismatch: got " + std::to_string(u.size()) + ", expected " +
                      std::to_string(head.in));
  Graph::NodeId row = ctx.g.reshape(utterance_embedding, {1, head.in});
  return ctx.g.reshape(head.forward(ctx, row), {2});
}

double detection_score(const Tensor& logits) {
  if (logits.size() != 2) throw UsageError("detection_score expects 2 logits");
  return logits[0] - logits[1];  // logit(bonafide) - logit(spoof)
}

}  // namespace spoofkit
