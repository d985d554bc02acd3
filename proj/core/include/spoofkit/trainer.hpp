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

#include "spoofkit/checkpoint.hpp"
#include "spoofkit/metrics.hpp"
#include "spoofkit/model.hpp"

namespace spoofkit {

// Adaptive-moment optimizer with Nesterov momentum (NAdam):
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   theta -= lr * (b1 m / (1-b1^{t+1}) + (1-b1) g / (1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
class NAdam {
 public:
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  void step(Parameters& P, const std::map<std::string, Tensor>& grads, double lr);
  int64_t step_count() const { return step_count_; }

  // checkpoint plumbing
  std::map<std::string, Tensor>& moments_m() { return m_; }
  std::map<std::string, Tensor>& moments_v() { return v_; }
  void restore(std::map<std::string, Tensor> m, std::map<std::string, Tensor> v, int64_t steps);

 private:
  std::map<std::string, Tensor> m_, v_;
  int64_t step_count_ = 0;
};

// 0.5 * (1 + cos(pi * phase / t_max)) * lr0; phase restarts every t_max
// steps or clamps there, per config.
double cosine_lr(double lr0, int64_t step, int t_max, bool restart);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_eer;
  double lr_last = 0.0;
  double p = 0.0, kappa = 0.0, lambda = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::vector<double> lr_trace;  // per optimizer step
};

struct TrainResult {
  TrainHistory history;
  std::string best_checkpoint_path;
  std::string last_checkpoint_path;
  std::optional<double> best_val_eer;
};

class Trainer {
 public:
  explicit Trainer(FullConfig cfg);

  // Full run; writes best.ckpt, last.ckpt and metrics.csv under out_dir.
  TrainResult train(const Manifest& train_manifest, const Manifest& val_manifest,
                    const std::string& resume_from = "");

  // Deterministic scores (no augmentation, no dropout), one per utterance.
  static ScoreSet evaluate(const Checkpoint& ckpt, const Manifest& manifest);

  const Parameters& parameters() const { return params_; }
  Parameters& mutable_parameters() { return params_; }
  const SpoofModel& model() const { return model_; }

 private:
  FullConfig cfg_;
  Parameters params_;
  SpoofModel model_;
  NAdam optimizer_;

  Waveform prepare_training_waveform(const Waveform& full, int epoch) const;
  ScoreSet score_waveforms(const std::vector<LabeledExample>& data);
};

struct AblationRow {
  Preset preset;
  std::string label;
  std::optional<double> eer;  // absent on failure
  std::string error;
};

struct AblationReport {
  std::vector<AblationRow> rows;

  std::string to_text() const;  // aligned table, EER percent, two decimals
  std::string to_csv() const;
};

// Trains and evaluates every preset under the same seed and data.
AblationReport run_ablation(const FullConfig& base, const std::vector<Preset>& presets,
                            const Manifest& train_manifest, const Manifest& val_manifest);

}  // namespace spoofkit
