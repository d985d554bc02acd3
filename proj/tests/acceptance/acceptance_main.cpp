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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "spoofkit/dsp.hpp"
#include "spoofkit/toydata.hpp"
#include "spoofkit/trainer.hpp"
#include "testutil.hpp"

using namespace spoofkit;
using testutil::eer_oracle;
using testutil::finite_diff_check;
using testutil::naive_mha_block;
using testutil::noise_wave;
using testutil::permute_rows;
using testutil::sine_wave;

namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "spoofkit_acceptance";
  fs::create_directories(dir);
  return dir;
}

// desk-scale model configs used by the training criteria
FullConfig overfit_config(const fs::path& out_dir) {
  FullConfig cfg;
  cfg.seed = 20;
  cfg.frontend.embedding_dim = 16;
  cfg.frontend.fbank_bins = 20;
  cfg.adapter.hidden_dim = 32;
  cfg.adapter.out_dim = 64;
  cfg.backbone.block_channels = {8, 8, 12, 12, 16, 24};
  cfg.backbone.node_dim = 32;
  cfg.attention.num_heads = 4;
  cfg.attention.dropout = 0.0;
  cfg.pooling.keep_spectral = 6;
  cfg.pooling.keep_temporal = 6;
  cfg.fusion.num_heads = 4;
  cfg.trainer.batch_size = 48;
  cfg.trainer.epochs = 20;
  cfg.trainer.lr = 8e-4;
  cfg.trainer.cosine_t_max = 300;
  cfg.trainer.warmup_no_val_epochs = 2;
  cfg.trainer.crop_seconds = 0.5;
  cfg.trainer.out_dir = out_dir.string();
  return cfg;
}

FullConfig ordering_config(const fs::path& out_dir, uint64_t seed) {
  FullConfig cfg;
  cfg.seed = seed;
  cfg.frontend.embedding_dim = 8;
  cfg.frontend.fbank_bins = 12;
  cfg.adapter.hidden_dim = 16;
  cfg.adapter.out_dim = 32;
  cfg.backbone.block_channels = {4, 4, 6, 6, 8, 12};
  cfg.backbone.node_dim = 16;
  cfg.attention.num_heads = 2;
  cfg.attention.dropout = 0.0;
  cfg.pooling.keep_spectral = 4;
  cfg.pooling.keep_temporal = 4;
  cfg.fusion.num_heads = 2;
  cfg.trainer.batch_size = 16;
  cfg.trainer.epochs = 6;
  cfg.trainer.lr = 1e-3;
  cfg.trainer.cosine_t_max = 300;
  cfg.trainer.warmup_no_val_epochs = 1;
  cfg.trainer.crop_seconds = 0.5;
  cfg.trainer.out_dir = out_dir.string();
  return cfg;
}

double train_set_eer(const std::string& ckpt_path, const Manifest& manifest) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  return compute_eer(Trainer::evaluate(ckpt, manifest)).eer;
}

// ---------------------------------------------------------------------------

Criterion criterion_1_eer_oracle() {
  Criterion c;
  auto make = [](std::vector<double> bona, std::vector<double> spoof) {
    ScoreSet s;
    int i = 0;
    for (double v : bona) s.records.push_back({"b" + std::to_string(i++), v, Label::kBonafide});
    for (double v : spoof) s.records.push_back({"s" + std::to_string(i++), v, Label::kSpoof});
    return s;
  };
  c.require(std::abs(compute_eer(make({0.9, 0.8}, {0.2, 0.1})).eer - 0.0) < 1e-12, "separable != 0");
  c.require(std::abs(compute_eer(make({0.1, 0.2}, {0.8, 0.9})).eer - 1.0) < 1e-12, "inverted != 1");
  c.require(std::abs(compute_eer(make({0.9, 0.8, 0.3}, {0.7, 0.2, 0.1})).eer - 1.0 / 3.0) < 1e-12,
            "mixed != 1/3");

  Rng rng(31337);
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform_int(0, 198));
    int n_bona = 1 + static_cast<int>(rng.uniform_int(0, n - 2));
    ScoreSet s;
    for (int i = 0; i < n; ++i) {
      double score = rng.normal() + (i < n_bona ? 0.4 : -0.4);
      if (trial % 4 == 0) score = std::round(score * 4.0) / 4.0;  // tie-heavy sets
      s.records.push_back({"u" + std::to_string(i), score, i < n_bona ? Label::kBonafide : Label::kSpoof});
    }
    worst = std::max(worst, std::abs(compute_eer(s).eer - eer_oracle(s)));
  }
  c.require(worst < 1e-9, "oracle deviation " + std::to_string(worst));
  return c;
}

Criterion criterion_2_attention_algebra() {
  Criterion c;
  Rng rng(11);

  // row-stochasticity on N=16, d=64
  {
    Parameters P;
    MhaBlock mha;
    mha.init(P, rng, "m", 64, 4);
    Graph g;
    FwdCtx ctx(g, P);
    AttentionTrace trace;
    mha.forward(ctx, g.leaf(Tensor::randn({16, 64}, rng)), &trace);
    for (const auto& a : trace.head_attention)
      for (int i = 0; i < a.dim(0); ++i) {
        double sum = 0;
        for (int j = 0; j < a.dim(1); ++j) {
          c.require(a.at(i, j) >= 0.0, "negative attention weight");
          sum += a.at(i, j);
        }
        c.require(std::abs(sum - 1.0) <= 1e-6, "attention row sum off by " + std::to_string(sum - 1.0));
      }

    Parameters Pg;
    PairwiseGat gat;
    gat.init(Pg, rng, "g", 16);
    Graph g2;
    FwdCtx ctx2(g2, Pg);
    AttentionTrace gat_trace;
    gat.forward(ctx2, g2.leaf(Tensor::randn({9, 16}, rng)), &gat_trace);
    for (int i = 0; i < 9; ++i) {
      double sum = 0;
      for (int j = 0; j < 9; ++j) sum += gat_trace.head_attention[0].at(i, j);
      c.require(std::abs(sum - 1.0) <= 1e-6, "gat row sum");
    }
  }

  // permutation equivariance
  {
    Parameters P;
    MhaBlock mha;
    mha.init(P, rng, "m", 32, 4);
    Tensor x = Tensor::randn({10, 32}, rng);
    std::vector<int> perm{7, 3, 9, 1, 0, 4, 8, 2, 6, 5};
    Graph g;
    FwdCtx ctx(g, P);
    Tensor fx = g.val(mha.forward(ctx, g.leaf(x)));
    Tensor fpx = g.val(mha.forward(ctx, g.leaf(permute_rows(x, perm))));
    Tensor pfx = permute_rows(fx, perm);
    double worst = 0;
    for (int64_t i = 0; i < pfx.size(); ++i) worst = std::max(worst, std::abs(fpx[i] - pfx[i]));
    c.require(worst <= 1e-5, "equivariance deviation " + std::to_string(worst));
  }

  // hetero -> homogeneous degeneracy with tied projections
  {
    int d = 16, heads = 4;
    Parameters Ph;
    HeteroMha hetero;
    hetero.init(Ph, rng, "h", d, heads, false);
    Ph.value("h.q_spectral.weight") = Ph.value("h.q_temporal.weight");
    Ph.value("h.q_spectral.bias") = Ph.value("h.q_temporal.bias");
    Ph.value("h.k_spectral.weight") = Ph.value("h.k_temporal.weight");
    Ph.value("h.k_spectral.bias") = Ph.value("h.k_temporal.bias");
    Parameters Pm;
    MhaBlock mha;
    Rng rng2(12);
    mha.init(Pm, rng2, "m", d, heads);
    for (auto [from, to] : std::vector<std::pair<const char*, const char*>>{
             {"h.ln1.gamma", "m.ln1.gamma"}, {"h.ln1.beta", "m.ln1.beta"},
             {"h.q_temporal.weight", "m.q.weight"}, {"h.q_temporal.bias", "m.q.bias"},
             {"h.k_temporal.weight", "m.k.weight"}, {"h.k_temporal.bias", "m.k.bias"},
             {"h.v_shared.weight", "m.v.weight"}, {"h.v_shared.bias", "m.v.bias"},
             {"h.out.weight", "m.out.weight"}, {"h.out.bias", "m.out.bias"},
             {"h.ln2.gamma", "m.ln2.gamma"}, {"h.ln2.beta", "m.ln2.beta"},
             {"h.ff1.weight", "m.ff1.weight"}, {"h.ff1.bias", "m.ff1.bias"},
             {"h.ff2.weight", "m.ff2.weight"}, {"h.ff2.bias", "m.ff2.bias"}})
      Pm.value(to) = Ph.value(from);

    Tensor temporal = Tensor::randn({9, d}, rng);
    Tensor spectral = Tensor::randn({7, d}, rng);
    Tensor joint({16, d});
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < 9; ++i) joint.at(i, j) = temporal.at(i, j);
      for (int i = 0; i < 7; ++i) joint.at(9 + i, j) = spectral.at(i, j);
    }
    Graph gh;
    FwdCtx ctxh(gh, Ph);
    auto res = hetero.forward(ctxh, NodeSetVar{gh.leaf(temporal), Modality::kTemporal},
                              NodeSetVar{gh.leaf(spectral), Modality::kSpectral}, -1);
    Graph gm;
    FwdCtx ctxm(gm, Pm);
    Tensor want = gm.val(mha.forward(ctxm, gm.leaf(joint)));
    double worst = 0;
    const Tensor& got_t = gh.val(res.temporal.id);
    const Tensor& got_s = gh.val(res.spectral.id);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(got_t.at(i, j) - want.at(i, j)));
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(got_s.at(i, j) - want.at(9 + i, j)));
    c.require(worst <= 1e-12, "degeneracy deviation " + std::to_string(worst));
  }

  // head assembly against the naive reference
  {
    Parameters P;
    MhaBlock mha;
    mha.init(P, rng, "m", 64, 4);
    Tensor x = Tensor::randn({7, 64}, rng);
    Graph g;
    FwdCtx ctx(g, P);
    Tensor got = g.val(mha.forward(ctx, g.leaf(x)));
    Tensor want = naive_mha_block(P, "m", x, 4);
    double worst = 0;
    for (int64_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    c.require(worst <= 1e-9, "head assembly deviation " + std::to_string(worst));
  }
  return c;
}

Criterion criterion_3_gradient_checks() {
  Criterion c;
  Rng rng(21);
  auto expect = [&](const char* what, double err) {
    c.require(err < 1e-4, std::string(what) + " rel err " + std::to_string(err));
  };

  {  // adapter
    Parameters P;
    Adapter ad;
    AdapterConfig acfg;
    acfg.hidden_dim = 6;
    acfg.out_dim = 4;
    ad.build(P, acfg, 5, rng);
    Tensor in = Tensor::randn({3, 5}, rng), w = Tensor::randn({1, 4, 3}, rng);
    expect("adapter", finite_diff_check(P, [&](FwdCtx& ctx) {
             return ctx.g.weighted_sum(ad.forward(ctx, ctx.g.leaf(in)), w);
           }).max_rel_err);
  }
  {  // resnet block
    Parameters P;
    ResnetBlock block;
    block.init(P, rng, "b", 2, 3, 1, 1);
    Tensor in = Tensor::randn({2, 5, 4}, rng), w = Tensor::randn({3, 5, 4}, rng);
    expect("resnet", finite_diff_check(P, [&](FwdCtx& ctx) {
             return ctx.g.weighted_sum(block.forward(ctx, ctx.g.leaf(in)), w);
           }).max_rel_err);
  }
  {  // pairwise gat
    Parameters P;
    PairwiseGat gat;
    gat.init(P, rng, "g", 6);
    Tensor in = Tensor::randn({4, 6}, rng), w = Tensor::randn({4, 6}, rng);
    expect("pairwise_gat", finite_diff_check(P, [&](FwdCtx& ctx) {
             return ctx.g.weighted_sum(gat.forward(ctx, ctx.g.leaf(in)), w);
           }).max_rel_err);
  }
  {  // mha
    Parameters P;
    MhaBlock mha;
    mha.init(P, rng, "m", 8, 2);
    Tensor in = Tensor::randn({5, 8}, rng), w = Tensor::randn({5, 8}, rng);
    expect("mha", finite_diff_check(P, [&](FwdCtx& ctx) {
             return ctx.g.weighted_sum(mha.forward(ctx, ctx.g.leaf(in)), w);
           }).max_rel_err);
  }
  {  // hetero mha (with stack node)
    Parameters P;
    HeteroMha hetero;
    hetero.init(P, rng, "h", 8, 2, true);
    Tensor xt = Tensor::randn({3, 8}, rng), xs = Tensor::randn({2, 8}, rng);
    Tensor stack = Tensor::randn({1, 8}, rng);
    Tensor wt = Tensor::randn({3, 8}, rng), ws = Tensor::randn({2, 8}, rng);
    expect("hetero_mha", finite_diff_check(P, [&](FwdCtx& ctx) {
             auto res = hetero.forward(ctx, NodeSetVar{ctx.g.leaf(xt), Modality::kTemporal},
                                       NodeSetVar{ctx.g.leaf(xs), Modality::kSpectral}, ctx.g.leaf(stack));
             return ctx.g.add(ctx.g.weighted_sum(res.temporal.id, wt),
                              ctx.g.weighted_sum(res.spectral.id, ws));
           }).max_rel_err);
  }
  {  // pooling gate
    Parameters P;
    GraphPool pool;
    pool.init(P, rng, "p", 5);
    Tensor in = Tensor::randn({6, 5}, rng), w = Tensor::randn({3, 5}, rng);
    expect("pool_gate", finite_diff_check(P, [&](FwdCtx& ctx) {
             return ctx.g.weighted_sum(
                 pool.forward(ctx, NodeSetVar{ctx.g.leaf(in), Modality::kSpectral}, 0.5).id, w);
           }).max_rel_err);
  }
  {  // max fusion (subgradient via inputs-as-parameters)
    Parameters P;
    P.declare("a", Tensor::randn({3, 4}, rng));
    P.declare("b", Tensor::randn({3, 4}, rng));
    Tensor w = Tensor::randn({3, 4}, rng);
    expect("max_fusion", finite_diff_check(P, [&](FwdCtx& ctx) {
             NodeSetVar out = max_fusion(ctx.g, NodeSetVar{ctx.use("a"), Modality::kSpectral},
                                         NodeSetVar{ctx.use("b"), Modality::kTemporal});
             return ctx.g.weighted_sum(out.id, w);
           }).max_rel_err);
  }
  {  // attention fusion
    Parameters P;
    AttentionFusion fusion;
    fusion.init(P, rng, 6, 2);
    Tensor xs = Tensor::randn({2, 6}, rng), xt = Tensor::randn({3, 6}, rng);
    Tensor w = Tensor::randn({5, 6}, rng);
    expect("attention_fusion", finite_diff_check(P, [&](FwdCtx& ctx) {
             NodeSetVar out = fusion.forward(ctx, NodeSetVar{ctx.g.leaf(xs), Modality::kSpectral},
                                             NodeSetVar{ctx.g.leaf(xt), Modality::kTemporal});
             return ctx.g.weighted_sum(out.id, w);
           }).max_rel_err);
  }
  {  // classifier
    Parameters P;
    Classifier clf;
    clf.init(P, rng, 7);
    Tensor u = Tensor::randn({7}, rng), w = Tensor::randn({2}, rng);
    expect("classifier", finite_diff_check(P, [&](FwdCtx& ctx) {
             return ctx.g.weighted_sum(clf.forward(ctx, ctx.g.leaf(u)), w);
           }).max_rel_err);
  }
  {  // all three losses
    FocalParams fp;
    LossScheduleState st;
    st.triggered = true;
    st.blend_lambda = 0.35;
    for (Label l : {Label::kBonafide, Label::kSpoof}) {
      Parameters P;
      P.declare("logits", Tensor({2}, {rng.normal(), rng.normal()}));
      expect("cross_entropy", finite_diff_check(P, [&](FwdCtx& ctx) {
               return cross_entropy(ctx.g, ctx.use("logits"), l);
             }).max_rel_err);
      expect("focal", finite_diff_check(P, [&](FwdCtx& ctx) {
               return focal_loss(ctx.g, ctx.use("logits"), l, fp);
             }).max_rel_err);
      expect("hybrid", finite_diff_check(P, [&](FwdCtx& ctx) {
               return hybrid_loss(ctx.g, ctx.use("logits"), l, st, fp);
             }).max_rel_err);
    }
  }
  return c;
}

Criterion criterion_4_loss_schedule() {
  Criterion c;
  Rng rng(41);
  FocalParams fp0;
  fp0.gamma = 0.0;
  fp0.use_alpha = false;
  for (int t = 0; t < 200; ++t) {
    Tensor logits({2}, {rng.normal() * 3, rng.normal() * 3});
    Label l = rng.uniform() < 0.5 ? Label::kBonafide : Label::kSpoof;
    double diff = std::abs(focal_loss_value(logits, l, fp0) - cross_entropy_value(logits, l));
    c.require(diff < 1e-9, "focal(gamma=0) vs CE diff " + std::to_string(diff));
  }

  FocalParams fp;
  for (int t = 0; t < 50; ++t) {
    Tensor logits({2}, {rng.normal(), rng.normal()});
    Label l = rng.uniform() < 0.5 ? Label::kBonafide : Label::kSpoof;
    double ce_v = cross_entropy_value(logits, l);
    double fl_v = focal_loss_value(logits, l, fp);
    LossScheduleState st;
    st.triggered = true;
    auto eval = [&](double lambda) {
      st.blend_lambda = lambda;
      Graph g;
      return g.val(hybrid_loss(g, g.leaf(logits), l, st, fp))[0];
    };
    double mid = eval(0.5);
    c.require(std::abs(mid - 0.5 * (ce_v + fl_v)) < 1e-9, "hybrid not linear at midpoint");
    double slope = (eval(0.8) - eval(0.2)) / 0.6;
    c.require(std::abs(slope - (fl_v - ce_v)) < 1e-9, "hybrid slope mismatch");
  }

  LossScheduleState st;
  st = update_schedule(st, 3, 0.09);
  c.require(!st.triggered, "triggered above threshold");
  st = update_schedule(st, 7, 0.0799);
  c.require(st.triggered && *st.trigger_epoch == 7 && st.blend_lambda == 0.0, "trigger epoch wrong");
  for (int e = 8; e <= 11; ++e) {
    st = update_schedule(st, e, 0.5);  // worse EER must not untrigger
    c.require(st.triggered, "latch released");
    c.require(std::abs(st.blend_lambda - (e - 7) / 5.0) < 1e-12, "ramp value wrong");
  }
  st = update_schedule(st, 12, 0.5);
  c.require(st.blend_lambda == 1.0, "lambda != 1 at trigger+5");
  st = update_schedule(st, 40, std::nullopt);
  c.require(st.blend_lambda == 1.0 && st.triggered, "lambda decayed after saturation");
  return c;
}

Criterion criterion_5_augmentation() {
  Criterion c;
  AugmentationSchedule sched;
  auto [p0, k0] = schedule_at(sched, 0);
  auto [p10, k10] = schedule_at(sched, 10);
  auto [p99, k99] = schedule_at(sched, 99);
  c.require(p0 == 0.5 && k0 == 1.0, "schedule start not (0.5, 1.0)");
  c.require(p10 == 0.9 && k10 == 1.8, "schedule end not (0.9, 1.8)");
  c.require(p99 == 0.9 && k99 == 1.8, "schedule not clamped");

  {  // codec firing rate over 1e5 seeded draws
    CodecConfig cfg;
    int fired = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
      AugmentationState st{0.9, 1.8, Rng(7000 + static_cast<uint64_t>(i))};
      if (codec_draw(st, cfg)) ++fired;
    }
    double rate = static_cast<double>(fired) / trials;
    c.require(std::abs(rate - 0.4) <= 0.02, "codec rate " + std::to_string(rate));
  }

  {  // forced-SNR coloured noise
    Waveform w = sine_wave(440.0, 1.0, 0.4);
    Rng rng(5);
    Waveform noisy = apply_coloured_noise(w, 3.0, 1.0, rng);
    std::vector<float> diff(w.samples.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = noisy.samples[i] - w.samples[i];
    double measured = 10.0 * std::log10(dsp::power(w.samples) / dsp::power(diff));
    c.require(std::abs(measured - 3.0) <= 0.5, "SNR " + std::to_string(measured));
  }

  {  // peak normalization postcondition
    EffectChainConfig chain;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      AugmentationState st{0.9, 1.8, Rng(seed)};
      Waveform out = apply_effect_chain(noise_wave(0.3, seed + 50, 0.3), st, chain);
      float peak = 0;
      for (float v : out.samples) peak = std::max(peak, std::abs(v));
      c.require(peak == 1.0f, "peak norm not exact");
    }
  }

  {  // variant 7 composition
    Waveform w = noise_wave(0.3, 5, 0.4);
    RawBoostParams p;
    p.variant = 7;
    Waveform direct = rawboost(w, p, 2718);
    p.variant = 1;
    Waveform chain = rawboost(w, p, 2718);
    p.variant = 2;
    chain = rawboost(chain, p, 2718);
    p.variant = 3;
    chain = rawboost(chain, p, 2718);
    bool same = direct.samples.size() == chain.samples.size();
    for (size_t i = 0; same && i < direct.samples.size(); ++i)
      same = direct.samples[i] == chain.samples[i];
    c.require(same, "variant 7 != 1*2*3 composition");
  }

  {  // full-stack bit determinism
    Waveform w = noise_wave(0.4, 9, 0.4);
    auto run = [&]() {
      RawBoostParams p;
      p.variant = 5;
      Waveform x = rawboost(w, p, 555);
      AugmentationState st{0.9, 1.4, Rng(556)};
      CodecConfig codec;
      EffectChainConfig chain;
      x = apply_codec_corruption(x, st, codec);
      return apply_effect_chain(x, st, chain);
    };
    Waveform a = run(), b = run();
    bool same = a.samples.size() == b.samples.size();
    for (size_t i = 0; same && i < a.samples.size(); ++i) same = a.samples[i] == b.samples[i];
    c.require(same, "augmentation not bit-deterministic");
  }
  return c;
}

Criterion criterion_6_freeze_contract() {
  Criterion c;
  auto dir = work_dir() / "freeze";
  fs::remove_all(dir);
  ToyDatasetSpec spec;
  spec.train_per_class = 4;
  spec.dev_per_class = 2;
  spec.duration_seconds = 0.25;
  ToyDataset ds = make_toy_dataset(dir.string(), spec);
  Manifest train = load_manifest(ds.train_manifest);

  for (bool frozen : {true, false}) {
    FullConfig cfg = ordering_config(dir / (frozen ? "frozen" : "trainable"), 3);
    apply_preset(cfg, frozen ? Preset::kFrozenFrontend : Preset::kTrainableFrontend);
    Trainer trainer(cfg);
    Parameters& P = trainer.mutable_parameters();

    // one real batch: forward + backward over four utterances
    std::map<std::string, Tensor> grads;
    double encoder_grad_norm = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto& entry = train.entries[static_cast<size_t>(i)];
      Waveform w = load_waveform(train.resolve_path(entry));
      w.id = entry.id;
      Graph g;
      FwdCtx ctx(g, P, true);
      Graph::NodeId logits = trainer.model().forward(ctx, w);
      Graph::NodeId loss = cross_entropy(g, logits, entry.label);
      g.backward(loss);
      accumulate_grads(ctx, grads);
      for (const auto& [name, id] : ctx.bindings())
        if (name.rfind("encoder.", 0) == 0) encoder_grad_norm += g.grad(id).norm2();
    }
    if (frozen) {
      c.require(encoder_grad_norm == 0.0, "frozen encoder saw gradient");
      for (const auto& name : P.trainable_names()) {
        bool allowed = name.rfind("adapter.", 0) == 0 || name.rfind("backbone.", 0) == 0 ||
                       name.rfind("attention.", 0) == 0 || name.rfind("classifier", 0) == 0;
        c.require(allowed, "unexpected trainable parameter " + name);
      }
      c.require(grads.count("encoder.proj.weight") == 0, "frozen encoder grad collected");
    } else {
      c.require(grads.count("encoder.proj.weight") == 1 &&
                    grads.at("encoder.proj.weight").norm2() > 0.0,
                "trainable encoder received no gradient");
    }
  }
  fs::remove_all(dir);
  return c;
}

Criterion criterion_7_overfit_and_ordering() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  auto dir = work_dir() / "overfit";
  fs::remove_all(dir);
  ToyDatasetSpec spec;  // 64 + 64 train utterances
  spec.train_per_class = 64;
  spec.dev_per_class = 16;
  spec.duration_seconds = 0.5;
  ToyDataset ds = make_toy_dataset(dir.string(), spec);
  Manifest train = load_manifest(ds.train_manifest);
  Manifest dev = load_manifest(ds.dev_manifest);

  {
    FullConfig cfg = overfit_config(dir / "full");
    apply_preset(cfg, Preset::kFull);
    Trainer trainer(cfg);
    TrainResult res = trainer.train(train, dev);
    double eer = train_set_eer(res.best_checkpoint_path, train);
    c.require(eer == 0.0, "train EER after overfit run = " + std::to_string(eer));
  }

  // preset ordering across 10 seeds on a slimmer config
  int full_wins = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    FullConfig base = ordering_config(dir / ("seed" + std::to_string(seed)), 100 + seed);
    FullConfig cfg_full = base, cfg_base = base;
    apply_preset(cfg_full, Preset::kFull);
    apply_preset(cfg_base, Preset::kBaseline);
    cfg_full.trainer.out_dir = (dir / ("seed" + std::to_string(seed)) / "full").string();
    cfg_base.trainer.out_dir = (dir / ("seed" + std::to_string(seed)) / "baseline").string();
    TrainResult rf = Trainer(cfg_full).train(train, dev);
    TrainResult rb = Trainer(cfg_base).train(train, dev);
    double ef = train_set_eer(rf.best_checkpoint_path, dev);
    double eb = train_set_eer(rb.best_checkpoint_path, dev);
    if (ef <= eb) ++full_wins;
  }
  c.require(full_wins >= 8, "full <= baseline in only " + std::to_string(full_wins) + "/10 seeds");

  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
  c.require(seconds.count() < 600, "criterion exceeded 10 minutes");
  c.detail << (c.detail.str().empty() ? "" : "; ") << "full<=baseline in " << full_wins
           << "/10 seeds, " << seconds.count() << "s";
  fs::remove_all(dir);
  return c;
}

Criterion criterion_8_reproducibility() {
  Criterion c;
  auto dir = work_dir() / "repro";
  fs::remove_all(dir);
  ToyDatasetSpec spec;
  spec.train_per_class = 8;
  spec.dev_per_class = 4;
  spec.duration_seconds = 0.25;
  ToyDataset ds = make_toy_dataset(dir.string(), spec);
  Manifest train = load_manifest(ds.train_manifest);
  Manifest dev = load_manifest(ds.dev_manifest);

  auto losses = [](const TrainResult& r) {
    std::vector<double> out;
    for (const auto& e : r.history.epochs) out.push_back(e.train_loss);
    return out;
  };

  {  // identical seeds, identical traces
    FullConfig cfg = ordering_config(dir / "a", 5);
    cfg.trainer.epochs = 3;
    TrainResult r1 = Trainer(cfg).train(train, dev);
    cfg.trainer.out_dir = (dir / "b").string();
    TrainResult r2 = Trainer(cfg).train(train, dev);
    auto l1 = losses(r1), l2 = losses(r2);
    bool same = l1.size() == l2.size();
    for (size_t i = 0; same && i < l1.size(); ++i) same = l1[i] == l2[i];
    c.require(same, "equal seeds diverged");
  }

  {  // checkpoint save/load/evaluate is bit-identical
    FullConfig cfg = ordering_config(dir / "c", 6);
    cfg.trainer.epochs = 2;
    cfg.trainer.warmup_no_val_epochs = 1;
    TrainResult r = Trainer(cfg).train(train, dev);
    Checkpoint ckpt = load_checkpoint(r.best_checkpoint_path);
    ScoreSet s1 = Trainer::evaluate(ckpt, dev);
    std::string copy = (dir / "copy.ckpt").string();
    save_checkpoint(ckpt, copy);
    ScoreSet s2 = Trainer::evaluate(load_checkpoint(copy), dev);
    bool same = s1.records.size() == s2.records.size();
    for (size_t i = 0; same && i < s1.records.size(); ++i)
      same = s1.records[i].score == s2.records[i].score;
    c.require(same, "checkpoint round-trip changed scores");
  }

  {  // 5 + 5 == 10
    FullConfig cfg = ordering_config(dir / "ten", 7);
    cfg.trainer.epochs = 10;
    cfg.trainer.warmup_no_val_epochs = 2;
    TrainResult full = Trainer(cfg).train(train, dev);

    FullConfig half = cfg;
    half.trainer.epochs = 5;
    half.trainer.out_dir = (dir / "five").string();
    TrainResult first = Trainer(half).train(train, dev);
    FullConfig second = cfg;
    second.trainer.out_dir = (dir / "five").string();
    TrainResult resumed = Trainer(second).train(train, dev, first.last_checkpoint_path);

    auto lf = losses(full);
    auto lh = losses(first);
    for (double v : losses(resumed)) lh.push_back(v);
    bool same = lf.size() == lh.size();
    for (size_t i = 0; same && i < lf.size(); ++i) same = lf[i] == lh[i];
    c.require(same, "5+5 resume diverged from uninterrupted 10");

    Checkpoint a = load_checkpoint(full.last_checkpoint_path);
    Checkpoint b = load_checkpoint(resumed.last_checkpoint_path);
    bool params_same = a.params.size() == b.params.size();
    for (const auto& [name, e] : a.params) {
      if (!params_same) break;
      auto it = b.params.find(name);
      params_same = it != b.params.end() && e.value.size() == it->second.value.size();
      for (int64_t i = 0; params_same && i < e.value.size(); ++i)
        params_same = e.value[i] == it->second.value[i];
    }
    c.require(params_same, "resumed parameters differ bitwise");
  }
  fs::remove_all(dir);
  return c;
}

Criterion criterion_9_ablation_report() {
  Criterion c;
  auto dir = work_dir() / "ablate";
  fs::remove_all(dir);
  ToyDatasetSpec spec;
  spec.train_per_class = 8;
  spec.dev_per_class = 4;
  spec.duration_seconds = 0.25;
  ToyDataset ds = make_toy_dataset(dir.string(), spec);
  Manifest train = load_manifest(ds.train_manifest);
  Manifest dev = load_manifest(ds.dev_manifest);

  FullConfig base = ordering_config(dir / "runs", 9);
  base.trainer.epochs = 3;
  base.trainer.warmup_no_val_epochs = 1;
  AblationReport report = run_ablation(base, all_presets(), train, dev);

  std::vector<std::string> want{
      "Baseline AASIST",
      "Trainable Wav2Vec front-end",
      "Frozen Wav2Vec front-end",
      "Multi-head self-attention in place of bespoke graph attention",
      "Learnable soft fusion implemented with MHA",
      "Full Proposed Modifications"};
  c.require(report.rows.size() == want.size(), "row count " + std::to_string(report.rows.size()));
  for (size_t i = 0; i < want.size() && i < report.rows.size(); ++i) {
    c.require(report.rows[i].label == want[i], "row label mismatch at " + std::to_string(i));
    c.require(report.rows[i].eer.has_value(), "row " + want[i] + " failed: " + report.rows[i].error);
    if (report.rows[i].eer)
      c.require(*report.rows[i].eer >= 0.0 && *report.rows[i].eer <= 1.0, "EER outside [0,1]");
  }
  // two-decimal percent formatting in both renderings
  std::string text = report.to_text();
  std::string csv = report.to_csv();
  size_t dots = 0;
  for (size_t pos = csv.find('.'); pos != std::string::npos; pos = csv.find('.', pos + 1)) {
    size_t digits = 0;
    while (pos + 1 + digits < csv.size() && isdigit(csv[pos + 1 + digits])) ++digits;
    c.require(digits == 2, "csv EER not two decimals");
    ++dots;
  }
  c.require(dots == report.rows.size(), "csv row count");
  c.require(text.find("Configuration") == 0, "text header missing");
  fs::remove_all(dir);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {"1 EER oracle equivalence", criterion_1_eer_oracle},
      {"2 attention algebra", criterion_2_attention_algebra},
      {"3 gradient checks", criterion_3_gradient_checks},
      {"4 loss schedule", criterion_4_loss_schedule},
      {"5 augmentation contracts", criterion_5_augmentation},
      {"6 freeze contract", criterion_6_freeze_contract},
      {"7 end-to-end overfit and ordering", criterion_7_overfit_and_ordering},
      {"8 reproducibility and resume", criterion_8_reproducibility},
      {"9 ablation report shape", criterion_9_ablation_report},
  };
  int failures = 0;
  for (const auto& e : entries) {
    auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail << "exception: " << ex.what();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    std::printf("[%s] criterion %s (%lld ms)%s%s\n", c.ok ? "PASS" : "FAIL", e.name,
                static_cast<long long>(ms.count()), c.detail.str().empty() ? "" : " -- ",
                c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all 9 acceptance criteria passed\n");
  return failures == 0 ? 0 : 1;
}
