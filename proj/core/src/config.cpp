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

#include "spoofkit/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace spoofkit {

using nlohmann::json;

Preset parse_preset(const std::string& name) {
  if (name == "baseline") return Preset::kBaseline;
  if (name == "frozen_frontend") return Preset::kFrozenFrontend;
  if (name == "trainable_frontend") return Preset::kTrainableFrontend;
  if (name == "mha") return Preset::kMha;
  if (name == "fusion") return Preset::kFusion;
  if (name == "full") return Preset::kFull;
  throw ConfigError("unknown preset '" + name +
                    "' (expected baseline|frozen_frontend|trainable_frontend|mha|fusion|full)");
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::kBaseline: return "baseline";
    case Preset::kFrozenFrontend: return "frozen_frontend";
    case Preset::kTrainableFrontend: return "trainable_frontend";
    case Preset::kMha: return "mha";
    case Preset::kFusion: return "fusion";
    case Preset::kFull: return "full";
  }
  return "?";
}

std::string preset_row_label(Preset p) {
  switch (p) {
    case Preset::kBaseline: return "Baseline AASIST";
    case Preset::kTrainableFrontend: return "Trainable Wav2Vec front-end";
    case Preset::kFrozenFrontend: return "Frozen Wav2Vec front-end";
    case Preset::kMha: return "Multi-head self-attention in place of bespoke graph attention";
    case Preset::kFusion: return "Learnable soft fusion implemented with MHA";
    case Preset::kFull: return "Full Proposed Modifications";
  }
  return "?";
}

std::vector<Preset> all_presets() {
  return {Preset::kBaseline, Preset::kTrainableFrontend, Preset::kFrozenFrontend,
          Preset::kMha,      Preset::kFusion,            Preset::kFull};
}

void apply_preset(FullConfig& cfg, Preset p) {
  cfg.preset = p;
  cfg.preset_explicit = true;
  switch (p) {
    case Preset::kBaseline:
      cfg.frontend.init = EncoderInit::kScratch;
      cfg.frontend.frozen = false;
      cfg.attention.formalism = AttentionFormalism::kPairwiseGat;
      cfg.fusion.strategy = FusionStrategy::kMax;
      cfg.augmentation.enabled = false;
      break;
    case Preset::kTrainableFrontend:
      cfg.frontend.init = EncoderInit::kPretrained;
      cfg.frontend.frozen = false;
      cfg.attention.formalism = AttentionFormalism::kPairwiseGat;
      cfg.fusion.strategy = FusionStrategy::kMax;
      cfg.augmentation.enabled = false;
      break;
    case Preset::kFrozenFrontend:
      cfg.frontend.init = EncoderInit::kPretrained;
      cfg.frontend.frozen = true;
      cfg.attention.formalism = AttentionFormalism::kPairwiseGat;
      cfg.fusion.strategy = FusionStrategy::kMax;
      cfg.augmentation.enabled = false;
      break;
    case Preset::kMha:
      cfg.frontend.init = EncoderInit::kPretrained;
      cfg.frontend.frozen = true;
      cfg.attention.formalism = AttentionFormalism::kMha;
      cfg.fusion.strategy = FusionStrategy::kMax;
      cfg.augmentation.enabled = false;
      break;
    case Preset::kFusion:
      cfg.frontend.init = EncoderInit::kPretrained;
      cfg.frontend.frozen = true;
      cfg.attention.formalism = AttentionFormalism::kMha;
      cfg.fusion.strategy = FusionStrategy::kAttention;
      cfg.augmentation.enabled = false;
      break;
    case Preset::kFull:
      cfg.frontend.init = EncoderInit::kPretrained;
      cfg.frontend.frozen = true;
      cfg.attention.formalism = AttentionFormalism::kMha;
      cfg.fusion.strategy = FusionStrategy::kAttention;
      cfg.augmentation.enabled = true;
      break;
  }
}

void FullConfig::validate() const {
  frontend.validate();
  backbone.validate();
  attention.validate(backbone.node_dim);
  focal.validate();
  if (augmentation.enabled) {
    augmentation.schedule.validate();
    augmentation.rawboost.validate();
    if (augmentation.rawboost_variants.empty())
      throw ConfigError("augmentation.rawboost.variants must not be empty when augmentation is on");
    for (int v : augmentation.rawboost_variants)
      if (v < 1 || v > 8) throw ConfigError("rawboost variant out of range 1..8: " + std::to_string(v));
    if (augmentation.codec_backend != "simulated" && augmentation.codec_backend != "external")
      throw ConfigError("augmentation.codec_backend must be simulated|external");
    if (augmentation.codec_backend == "external" && augmentation.external_mp3_command.empty())
      throw ConfigError("external codec backend requires augmentation.external_mp3_command");
  }
  if (pooling.keep_spectral < 1 || pooling.keep_temporal < 1)
    throw ConfigError("pooling keep counts must be >= 1");
  if (fusion.strategy == FusionStrategy::kMax && pooling.keep_spectral != pooling.keep_temporal)
    throw ConfigError("max fusion requires equal post-pool node counts per branch (pooling.keep_*)");
  if (fusion.strategy == FusionStrategy::kAttention) {
    if (fusion.num_heads < 1) throw ConfigError("fusion.num_heads must be >= 1");
    if (backbone.node_dim % fusion.num_heads != 0)
      throw ConfigError("fusion.num_heads must divide backbone.node_dim");
  }
  if (trainer.batch_size < 1) throw ConfigError("trainer.batch_size must be >= 1");
  if (trainer.epochs < 1) throw ConfigError("trainer.epochs must be >= 1");
  if (!(trainer.lr > 0)) throw ConfigError("trainer.lr must be > 0");
  if (trainer.cosine_t_max < 1) throw ConfigError("trainer.cosine_t_max must be >= 1");
  if (trainer.warmup_no_val_epochs < 0) throw ConfigError("trainer.warmup_no_val_epochs must be >= 0");
  if (!(trainer.crop_seconds > 0)) throw ConfigError("trainer.crop_seconds must be > 0");
  if (loss_ramp_epochs < 1) throw ConfigError("loss.ramp_epochs must be >= 1");
  if (loss_trigger_threshold <= 0 || loss_trigger_threshold >= 1)
    throw ConfigError("loss.trigger_threshold must be in (0,1)");
}

namespace {

template <typename T, size_t N>
void read_array(const json& j, const char* key, std::array<T, N>& out) {
  if (!j.contains(key)) return;
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != N)
    throw ConfigError(std::string("config field ") + key + " must be an array of " + std::to_string(N));
  for (size_t i = 0; i < N; ++i) out[i] = arr[i].get<T>();
}

json schedule_to_json(const AugmentationSchedule& s) {
  return json{{"p0", s.p0}, {"p_max", s.p_max}, {"kappa0", s.kappa0}, {"kappa_max", s.kappa_max},
              {"ramp_epochs", s.ramp_epochs}};
}

AugmentationSchedule schedule_from_json(const json& j) {
  AugmentationSchedule s;
  s.p0 = j.value("p0", s.p0);
  s.p_max = j.value("p_max", s.p_max);
  s.kappa0 = j.value("kappa0", s.kappa0);
  s.kappa_max = j.value("kappa_max", s.kappa_max);
  s.ramp_epochs = j.value("ramp_epochs", s.ramp_epochs);
  return s;
}

}  // namespace

FullConfig config_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  FullConfig c;
  c.seed = j.value("seed", c.seed);

  if (j.contains("data")) {
    const auto& d = j["data"];
    c.data.train_manifest = d.value("train_manifest", "");
    c.data.val_manifest = d.value("val_manifest", "");
  }
  if (j.contains("frontend")) {
    const auto& f = j["frontend"];
    std::string kind = f.value("kind", "synthetic");
    if (kind == "synthetic")
      c.frontend.kind = EncoderKind::kSynthetic;
    else if (kind == "external_ssl")
      c.frontend.kind = EncoderKind::kExternalSsl;
    else
      throw ConfigError("frontend.kind must be synthetic|external_ssl");
    c.frontend.frozen = f.value("frozen", c.frontend.frozen);
    c.frontend.embedding_dim = f.value("embedding_dim", c.frontend.embedding_dim);
    c.frontend.fbank_bins = f.value("fbank_bins", c.frontend.fbank_bins);
    std::string init = f.value("init", "pretrained");
    if (init == "pretrained")
      c.frontend.init = EncoderInit::kPretrained;
    else if (init == "scratch")
      c.frontend.init = EncoderInit::kScratch;
    else
      throw ConfigError("frontend.init must be pretrained|scratch");
    c.frontend.weights_path = f.value("weights_path", "");
    if (c.frontend.kind == EncoderKind::kExternalSsl) c.frontend.embedding_dim = 1024;
  }
  if (j.contains("adapter")) {
    const auto& a = j["adapter"];
    c.adapter.hidden_dim = a.value("hidden_dim", c.adapter.hidden_dim);
    c.adapter.out_dim = a.value("out_dim", c.adapter.out_dim);
  }
  if (j.contains("backbone")) {
    const auto& b = j["backbone"];
    read_array(b, "block_channels", c.backbone.block_channels);
    read_array(b, "freq_pool", c.backbone.freq_pool);
    read_array(b, "time_pool", c.backbone.time_pool);
    c.backbone.node_dim = b.value("node_dim", c.backbone.node_dim);
  }
  if (j.contains("attention")) {
    const auto& a = j["attention"];
    std::string formalism = a.value("formalism", "mha");
    if (formalism == "mha")
      c.attention.formalism = AttentionFormalism::kMha;
    else if (formalism == "pairwise_gat")
      c.attention.formalism = AttentionFormalism::kPairwiseGat;
    else
      throw ConfigError("attention.formalism must be pairwise_gat|mha");
    c.attention.num_heads = a.value("num_heads", c.attention.num_heads);
    c.attention.dropout = a.value("dropout", c.attention.dropout);
    c.attention.stack_node = a.value("stack_node", c.attention.stack_node);
  }
  if (j.contains("pooling")) {
    const auto& p = j["pooling"];
    c.pooling.keep_spectral = p.value("keep_spectral", c.pooling.keep_spectral);
    c.pooling.keep_temporal = p.value("keep_temporal", c.pooling.keep_temporal);
  }
  if (j.contains("fusion")) {
    const auto& f = j["fusion"];
    std::string strategy = f.value("strategy", "attention");
    if (strategy == "max")
      c.fusion.strategy = FusionStrategy::kMax;
    else if (strategy == "attention")
      c.fusion.strategy = FusionStrategy::kAttention;
    else
      throw ConfigError("fusion.strategy must be max|attention");
    c.fusion.num_heads = f.value("num_heads", c.fusion.num_heads);
  }
  if (j.contains("loss")) {
    const auto& l = j["loss"];
    c.focal.gamma = l.value("gamma", c.focal.gamma);
    c.focal.alpha = l.value("alpha", c.focal.alpha);
    c.focal.alpha_on_bonafide = l.value("alpha_on_bonafide", c.focal.alpha_on_bonafide);
    c.loss_trigger_threshold = l.value("trigger_threshold", c.loss_trigger_threshold);
    c.loss_ramp_epochs = l.value("ramp_epochs", c.loss_ramp_epochs);
  }
  if (j.contains("augmentation")) {
    const auto& a = j["augmentation"];
    c.augmentation.enabled = a.value("enabled", c.augmentation.enabled);
    if (a.contains("schedule")) c.augmentation.schedule = schedule_from_json(a["schedule"]);
    c.augmentation.codec.schedule = c.augmentation.schedule;
    if (a.contains("codec")) {
      const auto& cc = a["codec"];
      c.augmentation.codec.select_probability =
          cc.value("probability", c.augmentation.codec.select_probability);
      c.augmentation.codec_backend = cc.value("backend", c.augmentation.codec_backend);
      c.augmentation.external_mp3_command = cc.value("external_command", "");
    }
    if (a.contains("rawboost")) {
      const auto& r = a["rawboost"];
      auto& rb = c.augmentation.rawboost;
      if (r.contains("variants")) c.augmentation.rawboost_variants = r["variants"].get<std::vector<int>>();
      rb.n_bands = r.value("n_bands", rb.n_bands);
      rb.band_centre_lo_hz = r.value("band_centre_lo_hz", rb.band_centre_lo_hz);
      rb.band_centre_hi_hz = r.value("band_centre_hi_hz", rb.band_centre_hi_hz);
      rb.bandwidth_lo_hz = r.value("bandwidth_lo_hz", rb.bandwidth_lo_hz);
      rb.bandwidth_hi_hz = r.value("bandwidth_hi_hz", rb.bandwidth_hi_hz);
      rb.coeff_count_lo = r.value("coeff_count_lo", rb.coeff_count_lo);
      rb.coeff_count_hi = r.value("coeff_count_hi", rb.coeff_count_hi);
      rb.nonlinearity_orders = r.value("nonlinearity_orders", rb.nonlinearity_orders);
      rb.filter_gain_lo_db = r.value("filter_gain_lo_db", rb.filter_gain_lo_db);
      rb.filter_gain_hi_db = r.value("filter_gain_hi_db", rb.filter_gain_hi_db);
      rb.bias_lo_db = r.value("bias_lo_db", rb.bias_lo_db);
      rb.bias_hi_db = r.value("bias_hi_db", rb.bias_hi_db);
      rb.max_impulse_percent = r.value("max_impulse_percent", rb.max_impulse_percent);
      rb.impulse_gain = r.value("impulse_gain", rb.impulse_gain);
      rb.snr_lo_db = r.value("snr_lo_db", rb.snr_lo_db);
      rb.snr_hi_db = r.value("snr_hi_db", rb.snr_hi_db);
    }
  }
  if (j.contains("trainer")) {
    const auto& t = j["trainer"];
    c.trainer.batch_size = t.value("batch_size", c.trainer.batch_size);
    c.trainer.epochs = t.value("epochs", c.trainer.epochs);
    c.trainer.lr = t.value("lr", c.trainer.lr);
    c.trainer.cosine_t_max = t.value("cosine_t_max", c.trainer.cosine_t_max);
    c.trainer.cosine_restart = t.value("cosine_restart", c.trainer.cosine_restart);
    c.trainer.warmup_no_val_epochs = t.value("warmup_no_val_epochs", c.trainer.warmup_no_val_epochs);
    c.trainer.crop_seconds = t.value("crop_seconds", c.trainer.crop_seconds);
    c.trainer.out_dir = t.value("out_dir", c.trainer.out_dir);
  }
  // the preset (if any) is applied last so it wins on the ablation axes
  if (j.contains("preset")) apply_preset(c, parse_preset(j["preset"].get<std::string>()));
  return c;
}

FullConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const FullConfig& c) {
  json j;
  j["seed"] = c.seed;
  if (c.preset_explicit) j["preset"] = preset_name(c.preset);
  j["data"] = {{"train_manifest", c.data.train_manifest}, {"val_manifest", c.data.val_manifest}};
  j["frontend"] = {{"kind", c.frontend.kind == EncoderKind::kSynthetic ? "synthetic" : "external_ssl"},
                   {"frozen", c.frontend.frozen},
                   {"embedding_dim", c.frontend.embedding_dim},
                   {"fbank_bins", c.frontend.fbank_bins},
                   {"init", c.frontend.init == EncoderInit::kPretrained ? "pretrained" : "scratch"},
                   {"weights_path", c.frontend.weights_path}};
  j["adapter"] = {{"hidden_dim", c.adapter.hidden_dim}, {"out_dim", c.adapter.out_dim}};
  j["backbone"] = {{"block_channels", c.backbone.block_channels},
                   {"freq_pool", c.backbone.freq_pool},
                   {"time_pool", c.backbone.time_pool},
                   {"node_dim", c.backbone.node_dim}};
  j["attention"] = {
      {"formalism", c.attention.formalism == AttentionFormalism::kMha ? "mha" : "pairwise_gat"},
      {"num_heads", c.attention.num_heads},
      {"dropout", c.attention.dropout},
      {"stack_node", c.attention.stack_node}};
  j["pooling"] = {{"keep_spectral", c.pooling.keep_spectral}, {"keep_temporal", c.pooling.keep_temporal}};
  j["fusion"] = {{"strategy", c.fusion.strategy == FusionStrategy::kMax ? "max" : "attention"},
                 {"num_heads", c.fusion.num_heads}};
  j["loss"] = {{"gamma", c.focal.gamma},
               {"alpha", c.focal.alpha},
               {"alpha_on_bonafide", c.focal.alpha_on_bonafide},
               {"trigger_threshold", c.loss_trigger_threshold},
               {"ramp_epochs", c.loss_ramp_epochs}};
  const auto& rb = c.augmentation.rawboost;
  j["augmentation"] = {
      {"enabled", c.augmentation.enabled},
      {"schedule", schedule_to_json(c.augmentation.schedule)},
      {"codec",
       {{"probability", c.augmentation.codec.select_probability},
        {"backend", c.augmentation.codec_backend},
        {"external_command", c.augmentation.external_mp3_command}}},
      {"rawboost",
       {{"variants", c.augmentation.rawboost_variants},
        {"n_bands", rb.n_bands},
        {"band_centre_lo_hz", rb.band_centre_lo_hz},
        {"band_centre_hi_hz", rb.band_centre_hi_hz},
        {"bandwidth_lo_hz", rb.bandwidth_lo_hz},
        {"bandwidth_hi_hz", rb.bandwidth_hi_hz},
        {"coeff_count_lo", rb.coeff_count_lo},
        {"coeff_count_hi", rb.coeff_count_hi},
        {"nonlinearity_orders", rb.nonlinearity_orders},
        {"filter_gain_lo_db", rb.filter_gain_lo_db},
        {"filter_gain_hi_db", rb.filter_gain_hi_db},
        {"bias_lo_db", rb.bias_lo_db},
        {"bias_hi_db", rb.bias_hi_db},
        {"max_impulse_percent", rb.max_impulse_percent},
        {"impulse_gain", rb.impulse_gain},
        {"snr_lo_db", rb.snr_lo_db},
        {"snr_hi_db", rb.snr_hi_db}}}};
  j["trainer"] = {{"batch_size", c.trainer.batch_size},
                  {"epochs", c.trainer.epochs},
                  {"lr", c.trainer.lr},
                  {"cosine_t_max", c.trainer.cosine_t_max},
                  {"cosine_restart", c.trainer.cosine_restart},
                  {"warmup_no_val_epochs", c.trainer.warmup_no_val_epochs},
                  {"crop_seconds", c.trainer.crop_seconds},
                  {"out_dir", c.trainer.out_dir}};
  return j.dump(2);
}

std::string apply_json_override(const std::string& json_text, const std::string& dotted_assignment) {
  auto eq = dotted_assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key.path=value, got " + dotted_assignment);
  std::string path = dotted_assignment.substr(0, eq);
  std::string value = dotted_assignment.substr(eq + 1);
  json j = json::parse(json_text);
  json* node = &j;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("bad --set path: " + path);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::parse_error&) {
        parsed = value;  // bare string
      }
      (*node)[key] = parsed;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  return j.dump();
}

}  // namespace spoofkit
