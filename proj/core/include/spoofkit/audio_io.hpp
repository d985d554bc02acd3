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

#include "spoofkit/errors.hpp"

namespace spoofkit {

inline constexpr int kSampleRate = 16000;

// Mono float audio at a fixed rate. The universal currency between data
// loading, augmentation and the front-end.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kSampleRate;
  std::string id;

  size_t length() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class Label { kBonafide, kSpoof };

Label parse_label(const std::string& token);  // throws ConfigError on unknown token
std::string label_name(Label l);

struct LabeledExample {
  Waveform waveform;
  Label label = Label::kBonafide;
};

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the manifest's directory unless absolute
  Label label = Label::kBonafide;
};

// Ordered utterance list parsed from a TSV protocol file:
//   <id>\t<relative-path>\t<label>
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string base_dir;  // directory of the manifest file

  std::string resolve_path(const ManifestEntry& e) const;
};

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

// Reads a PCM WAV (16/24/32-bit int or float32), averages channels to mono
// and resamples to target_rate.
Waveform load_waveform(const std::string& path, int target_rate = kSampleRate);

// 16-bit PCM mono writer, used by the toy dataset generator and tests.
void save_waveform_wav16(const Waveform& w, const std::string& path);

}  // namespace spoofkit
