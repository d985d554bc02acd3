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

#include "spoofkit/audio_io.hpp"
#include "spoofkit/graph.hpp"

namespace spoofkit {

struct FocalParams {
  double gamma = 2.0;
  double alpha = 0.25;
  bool alpha_on_bonafide = true;  // which class gets alpha (the other gets 1-alpha)
  bool use_alpha = true;

  void validate() const;
};

// CE -> focal interpolation, triggered the first time the best validation
// EER drops below trigger_threshold; lambda then ramps linearly to 1 over
// ramp_epochs and stays there. The trigger is latched.
struct LossScheduleState {
  bool triggered = false;
  std::optional<int> trigger_epoch;
  double blend_lambda = 0.0;
  double trigger_threshold = 0.08;
  int ramp_epochs = 5;
};

// All losses consume a (2,) logits node and return a scalar node.
Graph::NodeId cross_entropy(Graph& g, Graph::NodeId logits, Label label);
Graph::NodeId focal_loss(Graph& g, Graph::NodeId logits, Label label, const FocalParams& fp);
Graph::NodeId hybrid_loss(Graph& g, Graph::NodeId logits, Label label, const LossScheduleState& state,
                          const FocalParams& fp);

// Value-only counterparts for metrics and tests.
double cross_entropy_value(const Tensor& logits, Label label);
double focal_loss_value(const Tensor& logits, Label label, const FocalParams& fp);

// Epoch-level transition; best_val_eer absent during warm-up epochs.
LossScheduleState update_schedule(LossScheduleState state, int epoch, std::optional<double> best_val_eer);

}  // namespace spoofkit
