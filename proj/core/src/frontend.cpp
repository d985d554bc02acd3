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

#include "spoofkit/frontend.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "spoofkit/dsp.hpp"

namespace spoofkit {

namespace {

// canonical "pretrained" stream, independent of any run seed
constexpr uint64_t kPretrainedSeed = 0x5AFE5EEDCAFED00DULL;
constexpr int kNfft = 512;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

void EncoderConfig::validate() const {
  if (embedding_dim < 1) throw ConfigError("frontend.embedding_dim must be >= 1");
  if (fbank_bins < 1) throw ConfigError("frontend.fbank_bins must be >= 1");
  if (kind == EncoderKind::kExternalSsl) {
    if (embedding_dim != 1024) throw ConfigError("external_ssl encoder requires embedding_dim == 1024");
    if (!frozen) throw ConfigError("external_ssl encoder is load-only and must stay frozen");
  }
}

Tensor log_fbank(const Waveform& w, int bins) {
  int frames = static_cast<int>(w.samples.size()) / kFrameSamples;
  if (frames < 1) throw UsageError("waveform too short for one 20 ms frame");
  Tensor out({frames, bins});

  // triangular mel filters over the one-sided kNfft spectrum
  double nyq = w.sample_rate / 2.0;
  double mel_lo = hz_to_mel(0.0), mel_hi = hz_to_mel(nyq);
  std::vector<double> centers(static_cast<size_t>(bins) + 2);
  for (int b = 0; b < bins + 2; ++b)
    centers[static_cast<size_t>(b)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * b / (bins + 1)) / nyq * (kNfft / 2.0);

  for (int f = 0; f < frames; ++f) {
    auto spec = dsp::rfft(w.samples.data() + static_cast<size_t>(f) * kFrameSamples, kFrameSamples, kNfft);
    for (int b = 0; b < bins; ++b) {
      double lo = centers[static_cast<size_t>(b)], mid = centers[static_cast<size_t>(b) + 1],
             hi = centers[static_cast<size_t>(b) + 2];
      double acc = 0;
      int k_lo = std::max(1, static_cast<int>(std::ceil(lo)));
      int k_hi = std::min(kNfft / 2, static_cast<int>(std::floor(hi)));
      for (int k = k_lo; k <= k_hi; ++k) {
        double weight = k <= mid ? (k - lo) / std::max(mid - lo, 1e-9)
                                 : (hi - k) / std::max(hi - mid, 1e-9);
        if (weight > 0) acc += weight * std::norm(spec[static_cast<size_t>(k)]);
      }
      out.at(f, b) = std::log(acc + 1e-10);
    }
  }
  return out;
}

void FrontendEncoder::build(Parameters& P, const EncoderConfig& cfg, Rng& model_rng) {
  cfg.validate();
  cfg_ = cfg;
  if (cfg.kind == EncoderKind::kExternalSsl) {
    namespace fs = std::filesystem;
    if (cfg.weights_path.empty() || !fs::exists(cfg.weights_path))
      throw ConfigError(
          "external_ssl encoder weights not found at '" + cfg.weights_path +
          "'; point frontend.weights_path at an exported encoder projection "
          "(see `spoofkit export-encoder`) or switch frontend.kind to \"synthetic\"");
    std::ifstream in(cfg.weights_path, std::ios::binary);
    int32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    if (!in || rows != cfg.fbank_bins || cols != cfg.embedding_dim)
      throw ConfigError("encoder weights file shape mismatch: " + cfg.weights_path);
    Tensor w({rows, cols});
    Tensor b({cols});
    in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * 8));
    in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * 8));
    if (!in) throw ConfigError("truncated encoder weights file: " + cfg.weights_path);
    proj_.in = rows;
    proj_.out = cols;
    proj_.w_name = std::string(kParamPrefix) + "proj.weight";
    proj_.b_name = std::string(kParamPrefix) + "proj.bias";
    P.declare(proj_.w_name, std::move(w), false);
    P.declare(proj_.b_name, std::move(b), false);
    return;
  }
  Rng pretrained(kPretrainedSeed);
  Rng& init_rng = cfg.init == EncoderInit::kPretrained ? pretrained : model_rng;
  proj_.init(P, init_rng, std::string(kParamPrefix) + "proj", cfg.fbank_bins, cfg.embedding_dim);
  if (cfg.frozen) {
    P.entry(proj_.w_name).trainable = false;
    P.entry(proj_.b_name).trainable = false;
  }
}

Graph::NodeId FrontendEncoder::encode(FwdCtx& ctx, const Waveform& w) const {
  Graph::NodeId feats = ctx.g.leaf(log_fbank(w, cfg_.fbank_bins));
  return ctx.g.tanh_op(proj_.forward(ctx, feats));
}

EmbeddingSequence FrontendEncoder::encode_value(Parameters& P, const Waveform& w) const {
  Graph g;
  FwdCtx ctx{g, P, /*training=*/false};
  Graph::NodeId id = encode(ctx, w);
  return EmbeddingSequence{g.val(id), static_cast<double>(w.sample_rate) / kFrameSamples};
}

void Adapter::build(Parameters& P, const AdapterConfig& cfg, int in_dim, Rng& rng) {
  if (cfg.hidden_dim < 1 || cfg.out_dim < 1) throw ConfigError("adapter dims must be >= 1");
  cfg_ = cfg;
  fc1_.init(P, rng, "adapter.fc1", in_dim, cfg.hidden_dim);
  fc2_.init(P, rng, "adapter.fc2", cfg.hidden_dim, cfg.out_dim);
}

Graph::NodeId Adapter::forward(FwdCtx& ctx, Graph::NodeId embeddings) const {
  const Tensor& e = ctx.g.val(embeddings);
  if (e.rank() != 2 || e.dim(1) != fc1_.in)
    throw ConfigError("adapter input dim " + std::to_string(e.rank() == 2 ? e.dim(1) : -1) +
                      " does not match configured " + std::to_string(fc1_.in));
  int t = e.dim(0);
  Graph::NodeId h = fc2_.forward(ctx, ctx.g.gelu(fc1_.forward(ctx, embeddings)));
  // (T, F_out) -> (1, F_out, T)
  return ctx.g.reshape(ctx.g.transpose(h), {1, cfg_.out_dim, t});
}

FeatureMap Adapter::forward_value(Parameters& P, const EmbeddingSequence& e) const {
  Graph g;
  FwdCtx ctx(g, P, /*training=*/false);
  return FeatureMap{g.val(forward(ctx, g.leaf(e.frames)))};
}

}  // namespace spoofkit
