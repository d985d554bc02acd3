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

#include "spoofkit/toydata.hpp"

#include <cmath>
#include <filesystem>

#include "spoofkit/rng.hpp"

namespace spoofkit {

namespace fs = std::filesystem;

Waveform toy_bonafide(uint64_t seed, double duration_seconds, const std::string& id) {
  Rng rng(seed);
  Waveform w;
  w.id = id;
  w.samples.resize(static_cast<size_t>(duration_seconds * kSampleRate));
  int tones = static_cast<int>(rng.uniform_int(2, 4));
  std::vector<double> freq(static_cast<size_t>(tones)), amp(static_cast<size_t>(tones)),
      phase(static_cast<size_t>(tones));
  for (int t = 0; t < tones; ++t) {
    freq[static_cast<size_t>(t)] = rng.uniform(100.0, 800.0);
    amp[static_cast<size_t>(t)] = rng.uniform(0.3, 1.0);
    phase[static_cast<size_t>(t)] = rng.uniform(0.0, 2.0 * M_PI);
  }
  double peak = 0.0;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    double s = 0.0;
    for (int t = 0; t < tones; ++t)
      s += amp[static_cast<size_t>(t)] *
           std::sin(2.0 * M_PI * freq[static_cast<size_t>(t)] * static_cast<double>(i) / kSampleRate +
                    phase[static_cast<size_t>(t)]);
    s += 1e-3 * rng.normal();  // tiny noise floor keeps frames non-degenerate
    w.samples[i] = static_cast<float>(s);
    peak = std::max(peak, std::abs(s));
  }
  for (float& v : w.samples) v = static_cast<float>(v / peak * 0.8);
  return w;
}

Waveform toy_spoof(uint64_t seed, double duration_seconds, const std::string& id) {
  Rng rng(seed);
  Waveform w;
  w.id = id;
  w.samples.resize(static_cast<size_t>(duration_seconds * kSampleRate));
  double peak = 0.0;
  for (auto& v : w.samples) {
    double s = rng.normal();
    v = static_cast<float>(s);
    peak = std::max(peak, std::abs(s));
  }
  for (float& v : w.samples) v = static_cast<float>(v / peak * 0.8);
  return w;
}

ToyDataset make_toy_dataset(const std::string& out_dir, const ToyDatasetSpec& spec) {
  fs::create_directories(fs::path(out_dir) / "wav");
  Manifest train, dev;
  train.base_dir = out_dir;
  dev.base_dir = out_dir;

  auto emit = [&](Manifest& manifest, const std::string& split, Label label, int index) {
    std::string id = split + "_" + label_name(label) + "_" + std::to_string(index);
    uint64_t seed = mix_seed(spec.seed, hash_str(id));
    Waveform w = label == Label::kBonafide ? toy_bonafide(seed, spec.duration_seconds, id)
                                           : toy_spoof(seed, spec.duration_seconds, id);
    std::string rel = "wav/" + id + ".wav";
    save_waveform_wav16(w, (fs::path(out_dir) / rel).string());
    manifest.entries.push_back({id, rel, label});
  };

  for (int i = 0; i < spec.train_per_class; ++i) {
    emit(train, "train", Label::kBonafide, i);
    emit(train, "train", Label::kSpoof, i);
  }
  for (int i = 0; i < spec.dev_per_class; ++i) {
    emit(dev, "dev", Label::kBonafide, i);
    emit(dev, "dev", Label::kSpoof, i);
  }

  ToyDataset out;
  out.train_manifest = (fs::path(out_dir) / "train.tsv").string();
  out.dev_manifest = (fs::path(out_dir) / "dev.tsv").string();
  save_manifest(train, out.train_manifest);
  save_manifest(dev, out.dev_manifest);
  return out;
}

}  // namespace spoofkit
