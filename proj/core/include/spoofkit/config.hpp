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

#include <string>
#include <vector>

#include "spoofkit/attention.hpp"
#include "spoofkit/augment.hpp"
#include "spoofkit/frontend.hpp"
#include "spoofkit/fusion.hpp"
#include "spoofkit/loss.hpp"
#include "spoofkit/rawboost.hpp"

namespace spoofkit {

// Ablation axes, mirroring the configuration rows of the reported tables.
enum class Preset { kBaseline, kFrozenFrontend, kTrainableFrontend, kMha, kFusion, kFull };

Preset parse_preset(const std::string& name);
std::string preset_name(Preset p);
std::string preset_row_label(Preset p);  // report row label
std::vector<Preset> all_presets();

struct PoolingConfig {
  // absolute node counts kept per branch (> 0); keeps max fusion shape-valid
  // for any utterance length
  int keep_spectral = 8;
  int keep_temporal = 8;
};

struct AugmentationConfig {
  bool enabled = false;
  AugmentationSchedule schedule;
  CodecConfig codec;
  EffectChainConfig chain;
  RawBoostParams rawboost;
  std::vector<int> rawboost_variants{1, 2, 3, 4, 5, 6, 7, 8};
  std::string codec_backend = "simulated";   // simulated | external
  std::string external_mp3_command;          // "{in} {out} {bitrate}" placeholders
};

struct TrainerConfig {
  int batch_size = 48;
  int epochs = 20;
  double lr = 1e-4;
  int cosine_t_max = 300;
  bool cosine_restart = true;
  int warmup_no_val_epochs = 2;
  double crop_seconds = 4.0;
  std::string out_dir = "runs";
};

struct DataConfig {
  std::string train_manifest;
  std::string val_manifest;
};

struct FullConfig {
  uint64_t seed = 42;
  Preset preset = Preset::kFull;
  bool preset_explicit = false;  // axes were set by a preset, not by hand
  DataConfig data;
  EncoderConfig frontend;
  AdapterConfig adapter;
  BackboneConfig backbone;
  AttentionConfig attention;
  PoolingConfig pooling;
  FusionConfig fusion;
  FocalParams focal;
  double loss_trigger_threshold = 0.08;
  int loss_ramp_epochs = 5;
  AugmentationConfig augmentation;
  TrainerConfig trainer;

  void validate() const;  // pre-flight; throws ConfigError before any training step
};

// The preset overrides the five ablation axes (front-end init/freeze,
// attention formalism, fusion strategy, augmentation) and leaves everything
// else as configured.
void apply_preset(FullConfig& cfg, Preset p);

FullConfig config_from_json_text(const std::string& json_text);
FullConfig load_config(const std::string& path);
std::string config_to_json_text(const FullConfig& cfg);

// `--set dotted.path=value` CLI override applied to the raw JSON document.
std::string apply_json_override(const std::string& json_text, const std::string& dotted_assignment);

}  // namespace spoofkit
