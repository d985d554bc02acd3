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

#include <optional>
#include <utility>

#include "spoofkit/audio_io.hpp"
#include "spoofkit/rng.hpp"

namespace spoofkit {

// Linear anneal of the application probability p and intensity kappa over
// the first ramp_epochs epochs, clamped at the max pair afterwards.
struct AugmentationSchedule {
  double p0 = 0.5;
  double p_max = 0.9;
  double kappa0 = 1.0;
  double kappa_max = 1.8;
  int ramp_epochs = 10;

  void validate() const;
};

std::pair<double, double> schedule_at(const AugmentationSchedule& s, int epoch);

struct AugmentationState {
  double p = 0.5;
  double kappa = 1.0;
  Rng rng{0};
};

AugmentationState make_augmentation_state(const AugmentationSchedule& s, int epoch, uint64_t seed);

enum class CodecKind { kMp3Like, kTelephone, kLowBitrateResample, kColouredNoise };

// All windows below interpolate with t = (kappa - kappa0)/(kappa_max - kappa0).
struct CodecConfig {
  double select_probability = 0.4;
  // MP3-like bitrate window [low, high] kb/s; high: 128->64, low: 64->32
  double bitrate_hi_start = 128.0, bitrate_hi_end = 64.0;
  double bitrate_lo_start = 64.0, bitrate_lo_end = 32.0;
  // coloured-noise SNR window, dB
  double snr_hi_start = 20.0, snr_hi_end = 9.0;
  double snr_lo_start = 14.0, snr_lo_end = 3.0;
  // resample-compression target-rate window, Hz
  double rate_hi_start = 8000.0, rate_hi_end = 5000.0;
  double rate_lo_start = 6000.0, rate_lo_end = 3000.0;
  double min_input_seconds = 0.1;  // shorter inputs pass through untouched
  AugmentationSchedule schedule;   // for the kappa normalization endpoints
  // when set, MP3 compression shells out instead of simulating:
  // placeholders {in} {out} {bitrate} are substituted
  std::string external_mp3_command;
};

// external-encoder backend for the MP3 branch
Waveform run_external_mp3(const Waveform& w, double bitrate_kbps, const std::string& command_template);

// Individual corruptions, deterministic given their arguments. The
// stochastic selector lives in apply_codec_corruption.
Waveform apply_mp3_like(const Waveform& w, double bitrate_kbps);
Waveform apply_telephone_bandlimit(const Waveform& w);
Waveform apply_low_bitrate_resample(const Waveform& w, double target_rate);
Waveform apply_coloured_noise(const Waveform& w, double snr_db, double spectral_alpha, Rng& rng);

// Dispatch one forced branch with kappa-interpolated parameter draws.
Waveform apply_codec_branch(const Waveform& w, CodecKind kind, const CodecConfig& cfg,
                            AugmentationState& state);

// The selection draw on its own: nullopt means identity, otherwise exactly
// one branch (uniform among the four). Exposed so the empirical firing rate
// can be counter-checked without running the corruptions.
std::optional<CodecKind> codec_draw(AugmentationState& state, const CodecConfig& cfg);

// With probability cfg.select_probability applies exactly one branch chosen
// uniformly from the four; identity otherwise.
Waveform apply_codec_corruption(const Waveform& w, AugmentationState& state, const CodecConfig& cfg);

struct EffectChainConfig {
  double gain_range_db = 6.0;           // +-6 dB, uniform in dB
  double pitch_semitones_per_kappa = 2.0;
  double pitch_cap_semitones = 3.6;
  double max_shift_fraction = 0.10;
  double lowpass_lo_hz = 2000.0;
  double lowpass_hi_hz = 7500.0;
  double min_input_seconds = 0.1;  // pitch shift skipped below this
};

// Deterministic stage primitives.
Waveform apply_gain_db(const Waveform& w, double db);
Waveform apply_pitch_shift(const Waveform& w, double semitones);
Waveform apply_circular_shift(const Waveform& w, size_t samples);
Waveform apply_lowpass(const Waveform& w, double cutoff_hz);
Waveform peak_normalize(const Waveform& w);

// gain -> pitch -> circular shift -> low-pass, each firing independently
// with probability state.p; peak normalization applied unconditionally last.
Waveform apply_effect_chain(const Waveform& w, AugmentationState& state, const EffectChainConfig& cfg);

}  // namespace spoofkit
