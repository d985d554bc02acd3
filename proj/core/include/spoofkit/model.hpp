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

#include "spoofkit/config.hpp"

namespace spoofkit {

// The end-to-end detector:
//
//   waveform -> encoder -> adapter -> 6 ResNet blocks -> bifurcate
//     -> per-branch attention -> cross-modal attention (stack node)
//     -> graph pooling -> per-branch attention -> cross-modal attention
//     -> fusion (element-wise max | joint self-attention)
//     -> readout (max ++ mean ++ stack) -> linear classifier -> 2 logits
//
// Per-branch and cross-modal blocks follow attention.formalism: the bespoke
// pairwise operator (cross-modal runs it on the joint node set) or standard
// MHA with the type-aware cross variant.
class SpoofModel {
 public:
  void build(Parameters& P, const FullConfig& cfg, Rng& model_rng);

  Graph::NodeId forward(FwdCtx& ctx, const Waveform& w, AttentionTrace* trace = nullptr) const;

  // eval-mode logits
  Tensor infer(Parameters& P, const Waveform& w) const;

  int utterance_embedding_dim() const;
  const FullConfig& config() const { return cfg_; }

 private:
  struct BranchStage {
    PairwiseGat gat;
    MhaBlock mha;
  };

  NodeSetVar branch_attend(FwdCtx& ctx, const BranchStage& stage, const NodeSetVar& nodes,
                           AttentionTrace* trace) const;
  void cross_attend(FwdCtx& ctx, int stage_index, NodeSetVar& temporal, NodeSetVar& spectral,
                    Graph::NodeId& stack, AttentionTrace* trace) const;

  FullConfig cfg_;
  FrontendEncoder encoder_;
  Adapter adapter_;
  Backbone backbone_;
  BranchStage stage1_spectral_, stage1_temporal_, stage2_spectral_, stage2_temporal_;
  PairwiseGat cross1_gat_, cross2_gat_;
  HeteroMha cross1_mha_, cross2_mha_;
  GraphPool pool_spectral_, pool_temporal_;
  AttentionFusion attention_fusion_;
  Classifier classifier_;
};

}  // namespace spoofkit
