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

namespace spoofkit {

// Separable toy corpus: bonafide utterances are sums of low-pass tones
// (< 800 Hz), spoof utterances are white noise. Writes WAVs plus
// train.tsv / dev.tsv manifests under out_dir.
struct ToyDatasetSpec {
  int train_per_class = 64;
  int dev_per_class = 16;
  double duration_seconds = 0.5;
  uint64_t seed = 7;
};

struct ToyDataset {
  std::string train_manifest;
  std::string dev_manifest;
};

ToyDataset make_toy_dataset(const std::string& out_dir, const ToyDatasetSpec& spec);

// in-memory single utterance generators, used by tests
Waveform toy_bonafide(uint64_t seed, double duration_seconds, const std::string& id);
Waveform toy_spoof(uint64_t seed, double duration_seconds, const std::string& id);

}  // namespace spoofkit
