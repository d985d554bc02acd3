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

#include <cstdint>
#include <vector>

#include "spoofkit/audio_io.hpp"
#include "spoofkit/rng.hpp"

namespace spoofkit {

// Signal-dependent waveform perturbations: convolutive (LnL) noise,
// impulsive noise and stationary coloured additive noise, combinable into
// eight canonical variants:
//   1 convolutive              5 convolutive + coloured   (serial)
//   2 impulsive                6 impulsive + coloured     (serial)
//   3 coloured additive        7 conv + imp + coloured    (serial)
//   4 convolutive + impulsive  8 conv, imp                (parallel sum)
struct RawBoostParams {
  int variant = 5;

  // multiband notch filter draws (convolutive + coloured primitives)
  int n_bands = 5;
  double band_centre_lo_hz = 20.0, band_centre_hi_hz = 8000.0;
  double bandwidth_lo_hz = 100.0, bandwidth_hi_hz = 1000.0;
  int coeff_count_lo = 10, coeff_count_hi = 100;

  // convolutive: nonlinearity order and per-order gain/bias, dB
  int nonlinearity_orders = 5;
  double filter_gain_lo_db = 0.0, filter_gain_hi_db = 0.0;
  double bias_lo_db = 5.0, bias_hi_db = 20.0;

  // impulsive: up to max_impulse_percent of samples perturbed, gain stddev
  double max_impulse_percent = 10.0;
  double impulse_gain = 2.0;

  // coloured additive: SNR window, dB
  double snr_lo_db = 10.0, snr_hi_db = 40.0;

  void validate() const;  // throws ConfigError
};

// Primitive perturbations; each consumes its own seeded stream.
std::vector<float> rawboost_convolutive(const std::vector<float>& x, const RawBoostParams& p,
                                        int sample_rate, uint64_t seed);
std::vector<float> rawboost_impulsive(const std::vector<float>& x, const RawBoostParams& p, uint64_t seed);
std::vector<float> rawboost_coloured(const std::vector<float>& x, const RawBoostParams& p,
                                     int sample_rate, uint64_t seed);

// Applies the configured variant. Primitive k inside any variant draws from
// the stream mix_seed(seed, k) with k in {1: convolutive, 2: impulsive,
// 3: coloured}, so composite variants reproduce chains of single-variant
// calls made with the same outer seed.
Waveform rawboost(const Waveform& w, const RawBoostParams& p, uint64_t seed);

}  // namespace spoofkit
