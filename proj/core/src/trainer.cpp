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

#include "spoofkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace spoofkit {

namespace fs = std::filesystem;

namespace {

// sub-stream tags hanging off the run seed / utterance seed
constexpr uint64_t kModelInitTag = 0x01;
constexpr uint64_t kEpochOrderTag = 0x02;
constexpr uint64_t kCropTag = 1;
constexpr uint64_t kRawBoostTag = 2;
constexpr uint64_t kCodecChainTag = 3;
constexpr uint64_t kDropoutTag = 4;

std::vector<LabeledExample> load_dataset(const Manifest& m) {
  std::vector<LabeledExample> out;
  out.reserve(m.entries.size());
  for (const auto& e : m.entries) {
    Waveform w = load_waveform(m.resolve_path(e));
    w.id = e.id;
    out.push_back(LabeledExample{std::move(w), e.label});
  }
  return out;
}

}  // namespace

void NAdam::step(Parameters& P, const std::map<std::string, Tensor>& grads, double lr) {
  ++step_count_;
  double t = static_cast<double>(step_count_);
  double bc_m_next = 1.0 - std::pow(beta1, t + 1.0);
  double bc_m = 1.0 - std::pow(beta1, t);
  double bc_v = 1.0 - std::pow(beta2, t);
  for (const auto& [name, g] : grads) {
    auto& entry = P.entry(name);
    if (!entry.trainable) continue;
    Tensor& m = m_.try_emplace(name, Tensor::zeros(g.shape())).first->second;
    Tensor& v = v_.try_emplace(name, Tensor::zeros(g.shape())).first->second;
    Tensor& theta = entry.value;
    for (int64_t i = 0; i < g.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      double m_hat = beta1 * m[i] / bc_m_next + (1.0 - beta1) * g[i] / bc_m;
      double v_hat = v[i] / bc_v;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

void NAdam::restore(std::map<std::string, Tensor> m, std::map<std::string, Tensor> v, int64_t steps) {
  m_ = std::move(m);
  v_ = std::move(v);
  step_count_ = steps;
}

double cosine_lr(double lr0, int64_t step, int t_max, bool restart) {
  int64_t phase = restart ? step % t_max : std::min<int64_t>(step, t_max);
  return 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(phase) / t_max)) * lr0;
}

Trainer::Trainer(FullConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng model_rng(mix_seed(cfg_.seed, kModelInitTag));
  model_.build(params_, cfg_, model_rng);
}

Waveform Trainer::prepare_training_waveform(const Waveform& full, int epoch) const {
  uint64_t useed = utterance_seed(cfg_.seed, full.id, epoch);
  Waveform w = full;

  auto crop_samples = static_cast<size_t>(cfg_.trainer.crop_seconds * w.sample_rate);
  if (crop_samples > 0 && w.samples.size() > crop_samples) {
    Rng crop_rng(mix_seed(useed, kCropTag));
    auto start = static_cast<size_t>(
        crop_rng.uniform_int(0, static_cast<int64_t>(w.samples.size() - crop_samples)));
    w.samples.assign(full.samples.begin() + static_cast<int64_t>(start),
                     full.samples.begin() + static_cast<int64_t>(start + crop_samples));
  }
  if (!cfg_.augmentation.enabled) return w;

  const auto& aug = cfg_.augmentation;
  Rng rb_rng(mix_seed(useed, kRawBoostTag));
  RawBoostParams rb = aug.rawboost;
  rb.variant = aug.rawboost_variants[static_cast<size_t>(
      rb_rng.uniform_int(0, static_cast<int64_t>(aug.rawboost_variants.size()) - 1))];
  w = rawboost(w, rb, rb_rng.next_u64());

  AugmentationState state = make_augmentation_state(aug.schedule, epoch, mix_seed(useed, kCodecChainTag));
  CodecConfig codec = aug.codec;
  codec.schedule = aug.schedule;
  if (aug.codec_backend == "external") codec.external_mp3_command = aug.external_mp3_command;
  w = apply_codec_corruption(w, state, codec);
  w = apply_effect_chain(w, state, aug.chain);
  return w;
}

ScoreSet Trainer::score_waveforms(const std::vector<LabeledExample>& data) {
  ScoreSet scores;
  scores.records.reserve(data.size());
  for (const auto& ex : data) {
    Tensor logits = model_.infer(params_, ex.waveform);
    scores.records.push_back({ex.waveform.id, detection_score(logits), ex.label});
  }
  return scores;
}

TrainResult Trainer::train(const Manifest& train_manifest, const Manifest& val_manifest,
                           const std::string& resume_from) {
  auto train_data = load_dataset(train_manifest);
  auto val_data = load_dataset(val_manifest);
  if (train_data.empty()) throw ConfigError("training manifest is empty");

  fs::create_directories(cfg_.trainer.out_dir);
  std::string best_path = (fs::path(cfg_.trainer.out_dir) / "best.ckpt").string();
  std::string last_path = (fs::path(cfg_.trainer.out_dir) / "last.ckpt").string();
  std::string metrics_path = (fs::path(cfg_.trainer.out_dir) / "metrics.csv").string();

  LossScheduleState schedule;
  schedule.trigger_threshold = cfg_.loss_trigger_threshold;
  schedule.ramp_epochs = cfg_.loss_ramp_epochs;
  std::optional<double> best_val_eer;
  int start_epoch = 0;

  if (!resume_from.empty()) {
    Checkpoint ckpt = load_checkpoint(resume_from);
    FullConfig saved = config_from_json_text(ckpt.config_json);
    // the epoch horizon and output directory may differ across a resume;
    // everything else must match or the run is not a continuation
    FullConfig a = saved, b = cfg_;
    a.trainer.epochs = b.trainer.epochs = 0;
    a.trainer.out_dir = b.trainer.out_dir = "";
    if (config_to_json_text(a) != config_to_json_text(b))
      throw ConfigError("resume checkpoint was trained with a different config: " + resume_from);
    restore_parameters(ckpt, params_);
    optimizer_.restore(std::move(ckpt.opt_m), std::move(ckpt.opt_v), ckpt.opt_step);
    schedule = ckpt.schedule;
    best_val_eer = ckpt.best_val_eer;
    start_epoch = ckpt.epoch + 1;
    if (start_epoch >= cfg_.trainer.epochs)
      throw ConfigError("checkpoint already covers epoch " + std::to_string(ckpt.epoch) +
                        "; raise trainer.epochs to resume " + resume_from);
  }

  std::ofstream metrics(metrics_path, start_epoch == 0 ? std::ios::trunc : std::ios::app);
  if (!metrics) throw IoError("cannot write metrics log: " + metrics_path);
  if (start_epoch == 0) metrics << "epoch,train_loss,val_eer,lr,p,kappa,lambda\n";

  auto save_state = [&](const std::string& path, int epoch) {
    Checkpoint ckpt = snapshot_parameters(params_);
    ckpt.config_json = config_to_json_text(cfg_);
    ckpt.seed = cfg_.seed;
    ckpt.epoch = epoch;
    ckpt.best_val_eer = best_val_eer;
    ckpt.schedule = schedule;
    ckpt.opt_m = optimizer_.moments_m();
    ckpt.opt_v = optimizer_.moments_v();
    ckpt.opt_step = optimizer_.step_count();
    save_checkpoint(ckpt, path);
  };

  int n = static_cast<int>(train_data.size());
  int batch = std::min(cfg_.trainer.batch_size, n);
  int steps_per_epoch = (n + batch - 1) / batch;

  TrainResult result;
  result.best_checkpoint_path = best_path;
  result.last_checkpoint_path = last_path;

  for (int epoch = start_epoch; epoch < cfg_.trainer.epochs; ++epoch) {
    schedule = update_schedule(schedule, epoch, best_val_eer);
    auto [p, kappa] = schedule_at(cfg_.augmentation.schedule, epoch);
    if (!cfg_.augmentation.enabled) {
      p = 0.0;
      kappa = 0.0;
    }

    // deterministic per-epoch order
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    Rng order_rng(mix_seed(mix_seed(cfg_.seed, kEpochOrderTag), static_cast<uint64_t>(epoch)));
    for (int i = n - 1; i > 0; --i)
      std::swap(order[static_cast<size_t>(i)],
                order[static_cast<size_t>(order_rng.uniform_int(0, i))]);

    double epoch_loss_sum = 0.0;
    double lr_last = 0.0;
    for (int b = 0; b < steps_per_epoch; ++b) {
      int64_t global_step = static_cast<int64_t>(epoch) * steps_per_epoch + b;
      double lr = cosine_lr(cfg_.trainer.lr, global_step, cfg_.trainer.cosine_t_max,
                            cfg_.trainer.cosine_restart);
      result.history.lr_trace.push_back(lr);
      lr_last = lr;

      int lo = b * batch, hi = std::min(n, lo + batch);
      std::map<std::string, Tensor> grads;
      double batch_loss = 0.0;
      for (int i = lo; i < hi; ++i) {
        const auto& example = train_data[static_cast<size_t>(order[static_cast<size_t>(i)])];
        Label label = example.label;
        Waveform w = prepare_training_waveform(example.waveform, epoch);
        Rng dropout_rng(mix_seed(utterance_seed(cfg_.seed, w.id, epoch), kDropoutTag));
        Graph g;
        FwdCtx ctx{g, params_, /*training=*/true, cfg_.attention.dropout, &dropout_rng};
        Graph::NodeId logits = model_.forward(ctx, w);
        Graph::NodeId loss = hybrid_loss(g, logits, label, schedule, cfg_.focal);
        double loss_value = g.val(loss)[0];
        if (!std::isfinite(loss_value))
          throw std::runtime_error("training diverged (non-finite loss) at step " +
                                   std::to_string(global_step) + ", utterance " + w.id);
        batch_loss += loss_value;
        g.backward(loss, 1.0 / (hi - lo));
        accumulate_grads(ctx, grads);
      }
      epoch_loss_sum += batch_loss;
      optimizer_.step(params_, grads, lr);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss_sum / n;
    stats.lr_last = lr_last;
    stats.p = p;
    stats.kappa = kappa;
    stats.lambda = schedule.blend_lambda;

    if (epoch >= cfg_.trainer.warmup_no_val_epochs && !val_data.empty()) {
      ScoreSet val_scores = score_waveforms(val_data);
      double eer = compute_eer(val_scores).eer;
      stats.val_eer = eer;
      if (!best_val_eer || eer < *best_val_eer) {
        best_val_eer = eer;
        save_state(best_path, epoch);
      }
    }

    char line[256];
    std::snprintf(line, sizeof(line), "%d,%.9g,%s,%.9g,%.9g,%.9g,%.9g\n", epoch, stats.train_loss,
                  stats.val_eer ? std::to_string(*stats.val_eer).c_str() : "", stats.lr_last, stats.p,
                  stats.kappa, stats.lambda);
    metrics << line;
    metrics.flush();

    result.history.epochs.push_back(stats);
    save_state(last_path, epoch);
  }

  result.best_val_eer = best_val_eer;
  if (!best_val_eer) {
    // no validation ever ran; the last state is the best we have
    save_state(best_path, cfg_.trainer.epochs - 1);
  }
  return result;
}

ScoreSet Trainer::evaluate(const Checkpoint& ckpt, const Manifest& manifest) {
  FullConfig cfg = config_from_json_text(ckpt.config_json);
  Parameters params;
  SpoofModel model;
  Rng model_rng(mix_seed(ckpt.seed, kModelInitTag));
  model.build(params, cfg, model_rng);
  restore_parameters(ckpt, params);

  ScoreSet scores;
  scores.records.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    Waveform w = load_waveform(manifest.resolve_path(e));
    w.id = e.id;
    Tensor logits = model.infer(params, w);
    scores.records.push_back({e.id, detection_score(logits), e.label});
  }
  return scores;
}

std::string AblationReport::to_text() const {
  size_t width = std::string("Configuration").size();
  for (const auto& r : rows) width = std::max(width, r.label.size());
  std::string out = "Configuration";
  out += std::string(width - 13 + 2, ' ') + "EER (%)\n";
  out += std::string(width + 9, '-') + "\n";
  char buf[64];
  for (const auto& r : rows) {
    out += r.label + std::string(width - r.label.size() + 2, ' ');
    if (r.eer) {
      std::snprintf(buf, sizeof(buf), "%6.2f", *r.eer * 100.0);
      out += buf;
    } else {
      out += "FAILED: " + r.error;
    }
    out += "\n";
  }
  return out;
}

std::string AblationReport::to_csv() const {
  std::string out = "configuration,eer_percent\n";
  char buf[64];
  for (const auto& r : rows) {
    std::string label = r.label;
    bool quote = label.find(',') != std::string::npos;
    out += quote ? "\"" + label + "\"" : label;
    out += ",";
    if (r.eer) {
      std::snprintf(buf, sizeof(buf), "%.2f", *r.eer * 100.0);
      out += buf;
    } else {
      out += "FAILED";
    }
    out += "\n";
  }
  return out;
}

AblationReport run_ablation(const FullConfig& base, const std::vector<Preset>& presets,
                            const Manifest& train_manifest, const Manifest& val_manifest) {
  if (presets.empty()) throw UsageError("run_ablation: no presets given");
  AblationReport report;
  for (Preset p : presets) {
    AblationRow row;
    row.preset = p;
    row.label = preset_row_label(p);
    try {
      FullConfig cfg = base;
      apply_preset(cfg, p);
      cfg.trainer.out_dir = (fs::path(base.trainer.out_dir) / preset_name(p)).string();
      Trainer trainer(cfg);
      TrainResult res = trainer.train(train_manifest, val_manifest);
      Checkpoint best = load_checkpoint(res.best_checkpoint_path);
      ScoreSet scores = Trainer::evaluate(best, val_manifest);
      row.eer = compute_eer(scores).eer;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace spoofkit
