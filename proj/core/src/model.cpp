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

#include "spoofkit/model.hpp"

#include <algorithm>

namespace spoofkit {

namespace {
constexpr const char* kStackParam = "attention.stack";
}

void SpoofModel::build(Parameters& P, const FullConfig& cfg, Rng& model_rng) {
  cfg.validate();
  cfg_ = cfg;
  int d = cfg.backbone.node_dim;

  encoder_.build(P, cfg.frontend, model_rng);
  adapter_.build(P, cfg.adapter, cfg.frontend.embedding_dim, model_rng);
  backbone_.build(P, cfg.backbone, /*in_channels=*/1, model_rng);

  bool pairwise = cfg.attention.formalism == AttentionFormalism::kPairwiseGat;
  auto init_stage = [&](BranchStage& s, const std::string& prefix) {
    if (pairwise)
      s.gat.init(P, model_rng, prefix, d);
    else
      s.mha.init(P, model_rng, prefix, d, cfg.attention.num_heads);
  };
  init_stage(stage1_spectral_, "attention.stage1.spectral");
  init_stage(stage1_temporal_, "attention.stage1.temporal");
  if (pairwise)
    cross1_gat_.init(P, model_rng, "attention.cross1", d);
  else
    cross1_mha_.init(P, model_rng, "attention.cross1", d, cfg.attention.num_heads,
                     cfg.attention.stack_node);
  pool_spectral_.init(P, model_rng, "attention.pool.spectral", d);
  pool_temporal_.init(P, model_rng, "attention.pool.temporal", d);
  init_stage(stage2_spectral_, "attention.stage2.spectral");
  init_stage(stage2_temporal_, "attention.stage2.temporal");
  if (pairwise)
    cross2_gat_.init(P, model_rng, "attention.cross2", d);
  else
    cross2_mha_.init(P, model_rng, "attention.cross2", d, cfg.attention.num_heads,
                     cfg.attention.stack_node);
  if (cfg.attention.stack_node)
    P.declare(kStackParam, Tensor::randn({d}, model_rng, 1.0 / std::sqrt(static_cast<double>(d))));
  if (cfg.fusion.strategy == FusionStrategy::kAttention)
    attention_fusion_.init(P, model_rng, d, cfg.fusion.num_heads);
  classifier_.init(P, model_rng, utterance_embedding_dim());
}

int SpoofModel::utterance_embedding_dim() const {
  int d = cfg_.backbone.node_dim;
  return 2 * d + (cfg_.attention.stack_node ? d : 0);
}

NodeSetVar SpoofModel::branch_attend(FwdCtx& ctx, const BranchStage& stage, const NodeSetVar& nodes,
                                     AttentionTrace* trace) const {
  if (cfg_.attention.formalism == AttentionFormalism::kPairwiseGat)
    return NodeSetVar{stage.gat.forward(ctx, nodes.id, trace), nodes.modality};
  return NodeSetVar{stage.mha.forward(ctx, nodes.id, trace), nodes.modality};
}

void SpoofModel::cross_attend(FwdCtx& ctx, int stage_index, NodeSetVar& temporal, NodeSetVar& spectral,
                              Graph::NodeId& stack, AttentionTrace* trace) const {
  Graph& g = ctx.g;
  if (cfg_.attention.formalism == AttentionFormalism::kPairwiseGat) {
    // joint pairwise attention over [temporal; spectral; stack]
    const PairwiseGat& layer = stage_index == 1 ? cross1_gat_ : cross2_gat_;
    int nt = g.val(temporal.id).dim(0);
    int ns = g.val(spectral.id).dim(0);
    std::vector<Graph::NodeId> parts{temporal.id, spectral.id};
    if (stack >= 0) parts.push_back(stack);
    Graph::NodeId joint = layer.forward(ctx, g.concat_rows(parts), trace);
    temporal.id = g.slice_rows(joint, 0, nt);
    spectral.id = g.slice_rows(joint, nt, ns);
    if (stack >= 0) stack = g.slice_rows(joint, nt + ns, 1);
    return;
  }
  const HeteroMha& layer = stage_index == 1 ? cross1_mha_ : cross2_mha_;
  auto result = layer.forward(ctx, temporal, spectral, stack, trace);
  temporal = result.temporal;
  spectral = result.spectral;
  stack = result.stack;
}

Graph::NodeId SpoofModel::forward(FwdCtx& ctx, const Waveform& w, AttentionTrace* trace) const {
  Graph& g = ctx.g;
  Graph::NodeId embeddings = encoder_.encode(ctx, w);
  Graph::NodeId feature_map = adapter_.forward(ctx, embeddings);
  Graph::NodeId encoded = backbone_.encode(ctx, feature_map);
  auto [spectral, temporal] = backbone_.bifurcate(ctx, encoded);

  Graph::NodeId stack = -1;
  if (cfg_.attention.stack_node)
    stack = g.reshape(ctx.use(kStackParam), {1, cfg_.backbone.node_dim});

  spectral = branch_attend(ctx, stage1_spectral_, spectral, trace);
  temporal = branch_attend(ctx, stage1_temporal_, temporal, trace);
  cross_attend(ctx, 1, temporal, spectral, stack, trace);

  int keep_s = cfg_.pooling.keep_spectral;
  int keep_t = cfg_.pooling.keep_temporal;
  if (cfg_.fusion.strategy == FusionStrategy::kMax) {
    // max fusion needs shape-identical branches for any utterance length
    int n_s = g.val(spectral.id).dim(0), n_t = g.val(temporal.id).dim(0);
    int k = std::min({keep_s, keep_t, n_s, n_t});
    keep_s = keep_t = k;
  }
  spectral = pool_spectral_.forward(ctx, spectral, 0.0, keep_s);
  temporal = pool_temporal_.forward(ctx, temporal, 0.0, keep_t);

  spectral = branch_attend(ctx, stage2_spectral_, spectral, trace);
  temporal = branch_attend(ctx, stage2_temporal_, temporal, trace);
  cross_attend(ctx, 2, temporal, spectral, stack, trace);

  NodeSetVar fused = cfg_.fusion.strategy == FusionStrategy::kMax
                         ? max_fusion(g, spectral, temporal)
                         : attention_fusion_.forward(ctx, spectral, temporal, trace);
  return classifier_.forward(ctx, readout(g, fused, stack));
}

Tensor SpoofModel::infer(Parameters& P, const Waveform& w) const {
  Graph g;
  FwdCtx ctx{g, P, /*training=*/false, /*dropout=*/0.0, nullptr};
  return g.val(forward(ctx, w));
}

}  // namespace spoofkit
