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

#include "spoofkit/audio_io.hpp"
#include "spoofkit/nn.hpp"

namespace spoofkit {

enum class EncoderKind { kSynthetic, kExternalSsl };
enum class EncoderInit { kPretrained, kScratch };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kSynthetic;
  bool frozen = true;
  int embedding_dim = 64;       // forced to 1024 for external_ssl
  int fbank_bins = 40;
  EncoderInit init = EncoderInit::kPretrained;
  std::string weights_path;     // external_ssl only

  void validate() const;
};

// T x D contextual embeddings at a fixed frame rate.
struct EmbeddingSequence {
  Tensor frames;        // (T, D)
  double frame_rate_hz = 50.0;
};

// C x F x T map feeding the residual backbone.
struct FeatureMap {
  Tensor tensor;  // (C, F, T)
};

inline constexpr int kFrameSamples = 320;  // 20 ms at 16 kHz

// Log mel-filterbank energies over non-overlapping 20 ms frames, (T, bins).
// Pure DSP; gradients never flow through it.
Tensor log_fbank(const Waveform& w, int bins);

// Front-end encoder: filterbank frames through a single projection + tanh.
// "Pretrained" weights come from a fixed canonical seed independent of the
// run seed; external_ssl loads the projection from a weights file instead
// and is always frozen.
class FrontendEncoder {
 public:
  void build(Parameters& P, const EncoderConfig& cfg, Rng& model_rng);

  // (T, embedding_dim) node id; T = floor(samples / 320)
  Graph::NodeId encode(FwdCtx& ctx, const Waveform& w) const;
  EmbeddingSequence encode_value(Parameters& P, const Waveform& w) const;  // eval convenience

  const EncoderConfig& config() const { return cfg_; }
  static constexpr const char* kParamPrefix = "encoder.";

 private:
  EncoderConfig cfg_;
  Linear proj_;
};

struct AdapterConfig {
  int hidden_dim = 256;
  int out_dim = 128;
};

// Two-layer MLP with a GELU between, applied per frame; output transposed
// into a 1 x F_out x T feature map.
class Adapter {
 public:
  void build(Parameters& P, const AdapterConfig& cfg, int in_dim, Rng& rng);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId embeddings) const;  // (T,D) -> (1,F_out,T)
  FeatureMap forward_value(Parameters& P, const EmbeddingSequence& e) const;
  int out_dim() const { return cfg_.out_dim; }

 private:
  AdapterConfig cfg_;
  Linear fc1_, fc2_;
};

}  // namespace spoofkit
