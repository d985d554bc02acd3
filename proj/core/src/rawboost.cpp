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

#include "spoofkit/rawboost.hpp"

#include <algorithm>
#include <cmath>

#include "spoofkit/dsp.hpp"
#include "spoofkit/errors.hpp"

namespace spoofkit {

namespace {

// peak-normalize only when the signal clips; keeps zero-noise paths identity
void norm_if_clipping(std::vector<float>& x) {
  float peak = 0.0f;
  for (float v : x) peak = std::max(peak, std::abs(v));
  if (peak > 1.0f)
    for (float& v : x) v /= peak;
}

std::vector<double> draw_notch_fir(const RawBoostParams& p, int sample_rate, Rng& rng) {
  std::vector<std::pair<double, double>> bands;
  double nyq = sample_rate / 2.0;
  for (int i = 0; i < p.n_bands; ++i) {
    double centre = rng.uniform(p.band_centre_lo_hz, std::min(p.band_centre_hi_hz, nyq));
    double bw = rng.uniform(p.bandwidth_lo_hz, p.bandwidth_hi_hz);
    bands.emplace_back(centre - bw / 2.0, centre + bw / 2.0);
  }
  int taps = static_cast<int>(rng.uniform_int(p.coeff_count_lo, p.coeff_count_hi)) | 1;
  return dsp::design_multinotch(bands, sample_rate, taps);
}

}  // namespace

void RawBoostParams::validate() const {
  if (variant < 1 || variant > 8)
    throw ConfigError("rawboost variant must be in 1..8, got " + std::to_string(variant));
  auto range_ok = [](double lo, double hi) { return lo <= hi; };
  if (!range_ok(band_centre_lo_hz, band_centre_hi_hz) || !range_ok(bandwidth_lo_hz, bandwidth_hi_hz) ||
      coeff_count_lo > coeff_count_hi || !range_ok(filter_gain_lo_db, filter_gain_hi_db) ||
      !range_ok(bias_lo_db, bias_hi_db) || !range_ok(snr_lo_db, snr_hi_db))
    throw ConfigError("rawboost parameter ranges must satisfy low <= high");
  if (n_bands < 1 || nonlinearity_orders < 1) throw ConfigError("rawboost counts must be >= 1");
}

std::vector<float> rawboost_convolutive(const std::vector<float>& x, const RawBoostParams& p,
                                        int sample_rate, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(x.size(), 0.0);
  for (int order = 1; order <= p.nonlinearity_orders; ++order) {
    double gain_db = rng.uniform(p.filter_gain_lo_db, p.filter_gain_hi_db);
    if (order > 1) gain_db -= rng.uniform(p.bias_lo_db, p.bias_hi_db);
    auto fir = draw_notch_fir(p, sample_rate, rng);
    std::vector<float> xo(x.size());
    for (size_t i = 0; i < x.size(); ++i)
      xo[i] = static_cast<float>(std::pow(static_cast<double>(x[i]), order));
    auto filtered = dsp::convolve_same(xo, fir);
    double g = std::pow(10.0, gain_db / 20.0);
    for (size_t i = 0; i < y.size(); ++i) y[i] += g * filtered[i];
  }
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(std::max<size_t>(y.size(), 1));
  std::vector<float> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(y[i] - mean);
  norm_if_clipping(out);
  return out;
}

std::vector<float> rawboost_impulsive(const std::vector<float>& x, const RawBoostParams& p, uint64_t seed) {
  Rng rng(seed);
  std::vector<float> out = x;
  double beta = rng.uniform(0.0, p.max_impulse_percent);
  auto n_hits = static_cast<size_t>(static_cast<double>(x.size()) * beta / 100.0);
  if (n_hits == 0) return out;
  // partial Fisher-Yates draw of n_hits distinct positions
  std::vector<size_t> pos(x.size());
  for (size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  for (size_t i = 0; i < n_hits; ++i) {
    size_t j = i + static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(pos.size() - 1 - i)));
    std::swap(pos[i], pos[j]);
  }
  for (size_t i = 0; i < n_hits; ++i) {
    double f = (2.0 * rng.uniform() - 1.0) * (2.0 * rng.uniform() - 1.0);
    size_t at = pos[i];
    out[at] = static_cast<float>(out[at] + p.impulse_gain * x[at] * f);
  }
  norm_if_clipping(out);
  return out;
}

std::vector<float> rawboost_coloured(const std::vector<float>& x, const RawBoostParams& p,
                                     int sample_rate, uint64_t seed) {
  Rng rng(seed);
  double snr_db = rng.uniform(p.snr_lo_db, p.snr_hi_db);
  auto fir = draw_notch_fir(p, sample_rate, rng);
  std::vector<float> noise(x.size());
  for (auto& v : noise) v = static_cast<float>(rng.normal());
  noise = dsp::convolve_same(noise, fir);
  float peak = 0.0f;
  for (float v : noise) peak = std::max(peak, std::abs(v));
  if (peak > 0.0f)
    for (float& v : noise) v /= peak;
  double nx = 0, nn = 0;
  for (float v : x) nx += static_cast<double>(v) * v;
  for (float v : noise) nn += static_cast<double>(v) * v;
  std::vector<float> out = x;
  if (nn > 0.0) {
    double scale = std::sqrt(nx) / (std::sqrt(nn) * std::pow(10.0, snr_db / 20.0));
    for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(out[i] + scale * noise[i]);
  }
  norm_if_clipping(out);
  return out;
}

Waveform rawboost(const Waveform& w, const RawBoostParams& p, uint64_t seed) {
  p.validate();
  auto conv = [&](const std::vector<float>& x) {
    return rawboost_convolutive(x, p, w.sample_rate, mix_seed(seed, 1));
  };
  auto imp = [&](const std::vector<float>& x) { return rawboost_impulsive(x, p, mix_seed(seed, 2)); };
  auto col = [&](const std::vector<float>& x) {
    return rawboost_coloured(x, p, w.sample_rate, mix_seed(seed, 3));
  };
  Waveform out = w;
  switch (p.variant) {
    case 1: out.samples = conv(w.samples); break;
    case 2: out.samples = imp(w.samples); break;
    case 3: out.samples = col(w.samples); break;
    case 4: out.samples = imp(conv(w.samples)); break;
    case 5: out.samples = col(conv(w.samples)); break;
    case 6: out.samples = col(imp(w.samples)); break;
    case 7: out.samples = col(imp(conv(w.samples))); break;
    case 8: {
      auto a = conv(w.samples);
      auto b = imp(w.samples);
      out.samples.resize(w.samples.size());
      for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = a[i] + b[i];
      norm_if_clipping(out.samples);
      break;
    }
    default: throw ConfigError("rawboost variant out of range");
  }
  return out;
}

}  // namespace spoofkit
