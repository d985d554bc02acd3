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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "spoofkit/toydata.hpp"
#include "spoofkit/trainer.hpp"
#include "testutil.hpp"

using namespace spoofkit;
namespace fs = std::filesystem;

namespace {

struct ToyFixture {
  fs::path dir;
  Manifest train, dev;

  explicit ToyFixture(const std::string& tag, int train_per_class = 4, int dev_per_class = 2) {
    dir = fs::temp_directory_path() / ("spoofkit_trainer_" + tag);
    fs::remove_all(dir);
    ToyDatasetSpec spec;
    spec.train_per_class = train_per_class;
    spec.dev_per_class = dev_per_class;
    spec.duration_seconds = 0.25;
    ToyDataset ds = make_toy_dataset(dir.string(), spec);
    train = load_manifest(ds.train_manifest);
    dev = load_manifest(ds.dev_manifest);
  }
  ~ToyFixture() { fs::remove_all(dir); }
};

FullConfig tiny_config(const fs::path& out_dir) {
  FullConfig cfg;
  cfg.seed = 1234;
  cfg.frontend.embedding_dim = 8;
  cfg.frontend.fbank_bins = 8;
  cfg.frontend.frozen = true;
  cfg.adapter.hidden_dim = 8;
  cfg.adapter.out_dim = 16;
  cfg.backbone.block_channels = {3, 3, 4, 4, 4, 6};
  cfg.backbone.node_dim = 8;
  cfg.attention.num_heads = 2;
  cfg.attention.dropout = 0.0;
  cfg.pooling.keep_spectral = 3;
  cfg.pooling.keep_temporal = 3;
  cfg.fusion.num_heads = 2;
  cfg.trainer.batch_size = 4;
  cfg.trainer.epochs = 2;
  cfg.trainer.lr = 1e-3;
  cfg.trainer.cosine_t_max = 10;
  cfg.trainer.warmup_no_val_epochs = 2;
  cfg.trainer.crop_seconds = 0.25;
  cfg.trainer.out_dir = out_dir.string();
  return cfg;
}

std::vector<double> epoch_losses(const TrainResult& r) {
  std::vector<double> out;
  for (const auto& e : r.history.epochs) out.push_back(e.train_loss);
  return out;
}

}  // namespace

TEST_CASE("cosine schedule matches its closed form, restart and clamp modes") {
  CHECK(cosine_lr(1e-4, 0, 300, true) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(cosine_lr(1e-4, 150, 300, true) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(cosine_lr(1e-4, 300, 300, true) == doctest::Approx(1e-4).epsilon(1e-12));  // restart
  CHECK(cosine_lr(1e-4, 450, 300, true) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(cosine_lr(1e-4, 300, 300, false) == doctest::Approx(0.0));
  CHECK(cosine_lr(1e-4, 10000, 300, false) == doctest::Approx(0.0));
}

TEST_CASE("per-utterance seeds recompute from first principles") {
  // independent re-implementation of the documented derivation
  auto fnv = [](const std::string& s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    return h;
  };
  auto sm = [](uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  auto mix = [&](uint64_t a, uint64_t b) { return sm(a ^ (b + 0x9E3779B97F4A7C15ULL)); };
  CHECK(utterance_seed(42, "utt_001", 7) == mix(mix(42, fnv("utt_001")), 7));
  CHECK(utterance_seed(42, "utt_001", 8) != utterance_seed(42, "utt_001", 7));
  CHECK(utterance_seed(42, "utt_002", 7) != utterance_seed(42, "utt_001", 7));
}

TEST_CASE("warm-up epochs skip validation entirely") {
  ToyFixture fx("warmup");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 2;
  cfg.trainer.warmup_no_val_epochs = 2;
  Trainer trainer(cfg);
  TrainResult r = trainer.train(fx.train, fx.dev);
  REQUIRE(r.history.epochs.size() == 2);
  CHECK_FALSE(r.history.epochs[0].val_eer.has_value());
  CHECK_FALSE(r.history.epochs[1].val_eer.has_value());
  CHECK_FALSE(r.best_val_eer.has_value());
}

TEST_CASE("equal seeds reproduce the loss trace exactly, different seeds do not") {
  ToyFixture fx("determinism");
  FullConfig cfg = tiny_config(fx.dir / "run1");
  cfg.attention.dropout = 0.1;  // dropout streams must be seed-derived too
  TrainResult r1 = Trainer(cfg).train(fx.train, fx.dev);
  cfg.trainer.out_dir = (fx.dir / "run2").string();
  TrainResult r2 = Trainer(cfg).train(fx.train, fx.dev);
  auto l1 = epoch_losses(r1), l2 = epoch_losses(r2);
  REQUIRE(l1.size() == l2.size());
  for (size_t i = 0; i < l1.size(); ++i) CHECK(l1[i] == l2[i]);  // bitwise at float64

  cfg.seed = 999;
  cfg.trainer.out_dir = (fx.dir / "run3").string();
  TrainResult r3 = Trainer(cfg).train(fx.train, fx.dev);
  CHECK(epoch_losses(r3)[0] != l1[0]);
}

TEST_CASE("lr trace follows the closed form at every step") {
  ToyFixture fx("lrtrace");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 3;
  TrainResult r = Trainer(cfg).train(fx.train, fx.dev);
  REQUIRE(!r.history.lr_trace.empty());
  for (size_t t = 0; t < r.history.lr_trace.size(); ++t) {
    double want = cosine_lr(cfg.trainer.lr, static_cast<int64_t>(t), cfg.trainer.cosine_t_max,
                            cfg.trainer.cosine_restart);
    CHECK(std::abs(r.history.lr_trace[t] - want) < 1e-12);
  }
}

TEST_CASE("checkpoint round-trip evaluates bit-identically") {
  ToyFixture fx("ckpt");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 3;
  cfg.trainer.warmup_no_val_epochs = 1;
  Trainer trainer(cfg);
  TrainResult r = trainer.train(fx.train, fx.dev);

  Checkpoint best = load_checkpoint(r.best_checkpoint_path);
  ScoreSet s1 = Trainer::evaluate(best, fx.dev);
  ScoreSet s2 = Trainer::evaluate(best, fx.dev);
  REQUIRE(s1.records.size() == fx.dev.entries.size());
  for (size_t i = 0; i < s1.records.size(); ++i) {
    CHECK(s1.records[i].score == s2.records[i].score);
    CHECK(s1.records[i].id == s2.records[i].id);
  }

  // a second save/load cycle stays bit-identical
  std::string copy_path = (fx.dir / "copy.ckpt").string();
  save_checkpoint(best, copy_path);
  Checkpoint again = load_checkpoint(copy_path);
  ScoreSet s3 = Trainer::evaluate(again, fx.dev);
  for (size_t i = 0; i < s1.records.size(); ++i) CHECK(s1.records[i].score == s3.records[i].score);
}

TEST_CASE("empty manifest evaluates to an empty score set") {
  ToyFixture fx("evalempty");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 1;
  Trainer trainer(cfg);
  TrainResult r = trainer.train(fx.train, fx.dev);
  Checkpoint last = load_checkpoint(r.last_checkpoint_path);
  Manifest empty;
  CHECK(Trainer::evaluate(last, empty).records.empty());
}

TEST_CASE("restoring a checkpoint into a mismatched model lists the offending names") {
  ToyFixture fx("mismatch");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 1;
  Trainer trainer(cfg);
  TrainResult r = trainer.train(fx.train, fx.dev);
  Checkpoint ckpt = load_checkpoint(r.last_checkpoint_path);

  FullConfig other = cfg;
  other.backbone.node_dim = 16;  // different architecture
  Parameters params;
  SpoofModel model;
  Rng rng(1);
  model.build(params, other, rng);
  CHECK_THROWS_WITH_AS(restore_parameters(ckpt, params), doctest::Contains("shape mismatch"),
                       ConfigError);
}

TEST_CASE("resumed training matches the uninterrupted run") {
  ToyFixture fx("resume");
  FullConfig cfg = tiny_config(fx.dir / "full");
  cfg.trainer.epochs = 4;
  cfg.trainer.warmup_no_val_epochs = 1;
  TrainResult full = Trainer(cfg).train(fx.train, fx.dev);

  FullConfig half = cfg;
  half.trainer.epochs = 2;
  half.trainer.out_dir = (fx.dir / "half").string();
  TrainResult first = Trainer(half).train(fx.train, fx.dev);

  FullConfig second = cfg;  // back to 4 epochs
  second.trainer.out_dir = (fx.dir / "half").string();
  // resume configs must match except for the epoch horizon
  TrainResult resumed = Trainer(second).train(fx.train, fx.dev, first.last_checkpoint_path);

  auto lf = epoch_losses(full);
  std::vector<double> lr = epoch_losses(first);
  for (double v : epoch_losses(resumed)) lr.push_back(v);
  REQUIRE(lf.size() == lr.size());
  for (size_t i = 0; i < lf.size(); ++i) CHECK(lf[i] == lr[i]);

  // final parameters agree bitwise
  Checkpoint a = load_checkpoint(full.last_checkpoint_path);
  Checkpoint b = load_checkpoint(resumed.last_checkpoint_path);
  REQUIRE(a.params.size() == b.params.size());
  for (const auto& [name, e] : a.params) {
    const Tensor& other = b.params.at(name).value;
    REQUIRE(e.value.size() == other.size());
    for (int64_t i = 0; i < e.value.size(); ++i) CHECK(e.value[i] == other[i]);
  }
}

TEST_CASE("resume rejects a different config") {
  ToyFixture fx("resumebad");
  FullConfig cfg = tiny_config(fx.dir / "a");
  cfg.trainer.epochs = 1;
  TrainResult r = Trainer(cfg).train(fx.train, fx.dev);
  FullConfig other = cfg;
  other.trainer.lr = 5e-4;
  other.trainer.epochs = 2;
  CHECK_THROWS_AS(Trainer(other).train(fx.train, fx.dev, r.last_checkpoint_path), ConfigError);
}

TEST_CASE("frozen preset trains only adapter, backbone, attention and classifier") {
  ToyFixture fx("inventory");
  FullConfig cfg = tiny_config(fx.dir / "run");
  apply_preset(cfg, Preset::kFrozenFrontend);
  Trainer trainer(cfg);
  auto trainable = trainer.parameters().trainable_names();
  REQUIRE(!trainable.empty());
  for (const auto& name : trainable) {
    bool ok = name.rfind("adapter.", 0) == 0 || name.rfind("backbone.", 0) == 0 ||
              name.rfind("attention.", 0) == 0 || name.rfind("classifier", 0) == 0;
    CHECK(ok);
    CHECK(name.rfind("encoder.", 0) != 0);
  }
  // encoder params exist but are frozen
  CHECK_FALSE(trainer.parameters().entry("encoder.proj.weight").trainable);
}

TEST_CASE("frozen encoder output is bit-identical across 100 optimizer steps") {
  ToyFixture fx("freezebits");
  FullConfig cfg = tiny_config(fx.dir / "run");
  apply_preset(cfg, Preset::kFrozenFrontend);
  cfg.trainer.epochs = 50;  // 2 steps per epoch at batch 4 over 8 utterances
  Trainer trainer(cfg);
  Parameters& P = trainer.mutable_parameters();

  FrontendEncoder enc;
  Parameters scratch;
  Rng enc_rng(mix_seed(cfg.seed, 0x01));
  enc.build(scratch, cfg.frontend, enc_rng);
  // same canonical pretrained weights as the model's encoder
  Waveform probe = load_waveform(fx.train.resolve_path(fx.train.entries[0]));
  probe.id = fx.train.entries[0].id;
  Tensor before = enc.encode_value(P, probe).frames;

  trainer.train(fx.train, fx.dev);
  Tensor after = enc.encode_value(P, probe).frames;
  REQUIRE(before.size() == after.size());
  for (int64_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
}

TEST_CASE("training aborts with the step index when the loss is non-finite") {
  ToyFixture fx("diverge");
  FullConfig cfg = tiny_config(fx.dir / "run");
  Trainer trainer(cfg);
  // poison one parameter so the very first forward pass produces NaN
  trainer.mutable_parameters().value("classifier.bias")[0] =
      std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(trainer.train(fx.train, fx.dev), doctest::Contains("step 0"),
                       std::runtime_error);
}

TEST_CASE("pre-flight validation rejects inconsistent configs before training") {
  FullConfig cfg = tiny_config("unused");
  cfg.trainer.batch_size = 0;
  CHECK_THROWS_AS(Trainer{cfg}, ConfigError);

  FullConfig cfg2 = tiny_config("unused");
  cfg2.fusion.strategy = FusionStrategy::kMax;
  cfg2.pooling.keep_spectral = 3;
  cfg2.pooling.keep_temporal = 4;
  CHECK_THROWS_AS(Trainer{cfg2}, ConfigError);

  FullConfig cfg3 = tiny_config("unused");
  cfg3.attention.num_heads = 3;  // does not divide node_dim 8
  CHECK_THROWS_AS(Trainer{cfg3}, ConfigError);
}

TEST_CASE("presets map onto the ablation axes") {
  FullConfig cfg;
  apply_preset(cfg, Preset::kBaseline);
  CHECK(cfg.frontend.init == EncoderInit::kScratch);
  CHECK_FALSE(cfg.frontend.frozen);
  CHECK(cfg.attention.formalism == AttentionFormalism::kPairwiseGat);
  CHECK(cfg.fusion.strategy == FusionStrategy::kMax);
  CHECK_FALSE(cfg.augmentation.enabled);

  apply_preset(cfg, Preset::kTrainableFrontend);
  CHECK(cfg.frontend.init == EncoderInit::kPretrained);
  CHECK_FALSE(cfg.frontend.frozen);

  apply_preset(cfg, Preset::kFrozenFrontend);
  CHECK(cfg.frontend.frozen);
  CHECK(cfg.attention.formalism == AttentionFormalism::kPairwiseGat);

  apply_preset(cfg, Preset::kMha);
  CHECK(cfg.attention.formalism == AttentionFormalism::kMha);
  CHECK(cfg.fusion.strategy == FusionStrategy::kMax);

  apply_preset(cfg, Preset::kFusion);
  CHECK(cfg.fusion.strategy == FusionStrategy::kAttention);
  CHECK_FALSE(cfg.augmentation.enabled);

  apply_preset(cfg, Preset::kFull);
  CHECK(cfg.frontend.frozen);
  CHECK(cfg.attention.formalism == AttentionFormalism::kMha);
  CHECK(cfg.fusion.strategy == FusionStrategy::kAttention);
  CHECK(cfg.augmentation.enabled);
}

TEST_CASE("preset row labels mirror the reported tables") {
  CHECK(preset_row_label(Preset::kBaseline) == "Baseline AASIST");
  CHECK(preset_row_label(Preset::kTrainableFrontend) == "Trainable Wav2Vec front-end");
  CHECK(preset_row_label(Preset::kFrozenFrontend) == "Frozen Wav2Vec front-end");
  CHECK(preset_row_label(Preset::kMha) ==
        "Multi-head self-attention in place of bespoke graph attention");
  CHECK(preset_row_label(Preset::kFusion) == "Learnable soft fusion implemented with MHA");
  CHECK(preset_row_label(Preset::kFull) == "Full Proposed Modifications");
}

TEST_CASE("config json round-trips and accepts dotted overrides") {
  FullConfig cfg = tiny_config("roundtrip");
  apply_preset(cfg, Preset::kMha);
  std::string text = config_to_json_text(cfg);
  FullConfig back = config_from_json_text(text);
  CHECK(config_to_json_text(back) == text);

  std::string overridden = apply_json_override(text, "trainer.lr=0.01");
  FullConfig cfg2 = config_from_json_text(overridden);
  CHECK(cfg2.trainer.lr == doctest::Approx(0.01));
  std::string bad = apply_json_override(text, "frontend.kind=bogus");
  CHECK_THROWS_AS(config_from_json_text(bad), ConfigError);
}

TEST_CASE("ablation records per-preset failures without aborting the rest") {
  ToyFixture fx("ablatefail");
  FullConfig base = tiny_config(fx.dir / "runs");
  base.trainer.epochs = 1;
  base.trainer.warmup_no_val_epochs = 0;
  // unequal keep counts: every max-fusion preset fails pre-flight, the
  // attention-fusion presets still train
  base.pooling.keep_spectral = 3;
  base.pooling.keep_temporal = 4;
  AblationReport report =
      run_ablation(base, {Preset::kBaseline, Preset::kFusion, Preset::kMha, Preset::kFull},
                   fx.train, fx.dev);
  REQUIRE(report.rows.size() == 4);
  CHECK_FALSE(report.rows[0].eer.has_value());  // baseline: max fusion, rejected
  CHECK(report.rows[0].error.find("equal post-pool") != std::string::npos);
  CHECK(report.rows[1].eer.has_value());        // fusion preset trains
  CHECK_FALSE(report.rows[2].eer.has_value());  // mha: max fusion, rejected
  CHECK(report.rows[3].eer.has_value());        // full trains
  std::string text = report.to_text();
  CHECK(text.find("FAILED") != std::string::npos);
}

TEST_CASE("resume past the configured horizon is rejected") {
  ToyFixture fx("resumedone");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 2;
  TrainResult r = Trainer(cfg).train(fx.train, fx.dev);
  CHECK_THROWS_WITH_AS(Trainer(cfg).train(fx.train, fx.dev, r.last_checkpoint_path),
                       doctest::Contains("already covers"), ConfigError);
}

TEST_CASE("ablation report renders two-decimal EER rows in table order") {
  AblationReport report;
  report.rows.push_back({Preset::kBaseline, preset_row_label(Preset::kBaseline), 0.275, ""});
  report.rows.push_back({Preset::kFull, preset_row_label(Preset::kFull), 0.0766, ""});
  report.rows.push_back({Preset::kMha, preset_row_label(Preset::kMha), std::nullopt, "boom"});
  std::string text = report.to_text();
  CHECK(text.find("Baseline AASIST") != std::string::npos);
  CHECK(text.find("27.50") != std::string::npos);
  CHECK(text.find("7.66") != std::string::npos);
  CHECK(text.find("FAILED: boom") != std::string::npos);
  std::string csv = report.to_csv();
  CHECK(csv.find("configuration,eer_percent") == 0);
  CHECK(csv.find("Full Proposed Modifications,7.66") != std::string::npos);
}

TEST_CASE("metrics csv is written with the documented columns") {
  ToyFixture fx("csv");
  FullConfig cfg = tiny_config(fx.dir / "run");
  cfg.trainer.epochs = 1;
  Trainer(cfg).train(fx.train, fx.dev);
  std::ifstream in(fx.dir / "run" / "metrics.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "epoch,train_loss,val_eer,lr,p,kappa,lambda");
  std::string row;
  CHECK(std::getline(in, row).good());
  CHECK(row.rfind("0,", 0) == 0);
}
