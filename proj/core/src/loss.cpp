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

#include "spoofkit/loss.hpp"

#include <algorithm>
#include <cmath>

namespace spoofkit {

namespace {

int label_index(Label l) { return l == Label::kBonafide ? 0 : 1; }

double alpha_for(Label l, const FocalParams& fp) {
  if (!fp.use_alpha) return 1.0;
  bool is_alpha_class = (l == Label::kBonafide) == fp.alpha_on_bonafide;
  return is_alpha_class ? fp.alpha : 1.0 - fp.alpha;
}

}  // namespace

void FocalParams::validate() const {
  if (gamma < 0.0) throw ConfigError("focal gamma must be >= 0");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("focal alpha must be in [0,1]");
}

Graph::NodeId cross_entropy(Graph& g, Graph::NodeId logits, Label label) {
  Graph::NodeId log_p = g.gather_elem(g.log_softmax_vec(logits), label_index(label));
  return g.scale(log_p, -1.0);
}

Graph::NodeId focal_loss(Graph& g, Graph::NodeId logits, Label label, const FocalParams& fp) {
  fp.validate();
  Graph::NodeId log_pt = g.gather_elem(g.log_softmax_vec(logits), label_index(label));
  Graph::NodeId focal_weight = g.pow_const(g.sub_from_const(1.0, g.exp_op(log_pt)), fp.gamma);
  return g.scale(g.mul(focal_weight, g.scale(log_pt, -1.0)), alpha_for(label, fp));
}

Graph::NodeId hybrid_loss(Graph& g, Graph::NodeId logits, Label label, const LossScheduleState& state,
                          const FocalParams& fp) {
  double lambda = state.blend_lambda;
  if (lambda <= 0.0) return cross_entropy(g, logits, label);
  if (lambda >= 1.0) return focal_loss(g, logits, label, fp);
  return g.add(g.scale(cross_entropy(g, logits, label), 1.0 - lambda),
               g.scale(focal_loss(g, logits, label, fp), lambda));
}

double cross_entropy_value(const Tensor& logits, Label label) {
  Graph g;
  return g.val(cross_entropy(g, g.leaf(logits), label))[0];
}

double focal_loss_value(const Tensor& logits, Label label, const FocalParams& fp) {
  Graph g;
  return g.val(focal_loss(g, g.leaf(logits), label, fp))[0];
}

LossScheduleState update_schedule(LossScheduleState state, int epoch, std::optional<double> best_val_eer) {
  if (!state.triggered && best_val_eer.has_value() && *best_val_eer < state.trigger_threshold) {
    state.triggered = true;
    state.trigger_epoch = epoch;
  }
  if (state.triggered) {
    double ramp = static_cast<double>(epoch - *state.trigger_epoch) / state.ramp_epochs;
    state.blend_lambda = std::clamp(ramp, 0.0, 1.0);
  } else {
    state.blend_lambda = 0.0;
  }
  return state;
}

}  // namespace spoofkit
