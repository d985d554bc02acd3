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

#include "spoofkit/augment.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "spoofkit/dsp.hpp"
#include "spoofkit/errors.hpp"

namespace spoofkit {

namespace {

double lerp(double a, double b, double t) { return a + (b - a) * t; }

double kappa_t(const AugmentationSchedule& s, double kappa) {
  if (s.kappa_max <= s.kappa0) return 0.0;
  return std::clamp((kappa - s.kappa0) / (s.kappa_max - s.kappa0), 0.0, 1.0);
}

}  // namespace

void AugmentationSchedule::validate() const {
  if (!(p0 >= 0.0 && p0 <= p_max && p_max <= 1.0))
    throw ConfigError("augmentation schedule requires 0 <= p0 <= p_max <= 1");
  if (!(kappa0 <= kappa_max)) throw ConfigError("augmentation schedule requires kappa0 <= kappa_max");
  if (ramp_epochs < 1) throw ConfigError("augmentation schedule requires ramp_epochs >= 1");
}

std::pair<double, double> schedule_at(const AugmentationSchedule& s, int epoch) {
  s.validate();
  if (epoch < 0) throw UsageError("schedule_at: epoch must be >= 0");
  double t = std::min(1.0, static_cast<double>(epoch) / s.ramp_epochs);
  return {lerp(s.p0, s.p_max, t), lerp(s.kappa0, s.kappa_max, t)};
}

AugmentationState make_augmentation_state(const AugmentationSchedule& s, int epoch, uint64_t seed) {
  auto [p, kappa] = schedule_at(s, epoch);
  return AugmentationState{p, kappa, Rng(seed)};
}

// ---------------------------------------------------------------------------
// codec menu
// ---------------------------------------------------------------------------

Waveform apply_mp3_like(const Waveform& w, double bitrate_kbps) {
  // Simulated compression: bitrate maps to a low-pass cutoff and a mu-law
  // quantizer depth. 128 kb/s ~ (7.5 kHz, 10 bits); 32 kb/s ~ (2 kHz, 6 bits).
  double x = std::clamp((bitrate_kbps - 32.0) / (128.0 - 32.0), 0.0, 1.0);
  double cutoff = 2000.0 + 5500.0 * x;
  int bits = static_cast<int>(std::lround(6.0 + 4.0 * x));
  double levels = std::pow(2.0, bits) / 2.0;
  const double mu = 255.0;

  Waveform out = w;
  out.samples = dsp::convolve_same(w.samples, dsp::design_lowpass(cutoff, w.sample_rate, 101));
  double peak = 0;
  for (float v : out.samples) peak = std::max(peak, std::abs(static_cast<double>(v)));
  if (peak == 0.0) return out;
  for (float& v : out.samples) {
    double s = v / peak;
    double companded = std::copysign(std::log1p(mu * std::abs(s)) / std::log1p(mu), s);
    double q = std::round(companded * levels) / levels;
    double expanded = std::copysign((std::pow(1.0 + mu, std::abs(q)) - 1.0) / mu, q);
    v = static_cast<float>(expanded * peak);
  }
  return out;
}

Waveform apply_telephone_bandlimit(const Waveform& w) {
  Waveform out = w;
  out.samples = dsp::convolve_same(w.samples, dsp::design_bandpass(300.0, 3400.0, w.sample_rate, 101));
  return out;
}

Waveform apply_low_bitrate_resample(const Waveform& w, double target_rate) {
  Waveform out = w;
  auto down = dsp::resample(w.samples, w.sample_rate, target_rate);
  auto up = dsp::resample(down, target_rate, w.sample_rate);
  up.resize(w.samples.size(), 0.0f);  // restore original length
  out.samples = std::move(up);
  return out;
}

Waveform apply_coloured_noise(const Waveform& w, double snr_db, double spectral_alpha, Rng& rng) {
  size_t n = w.samples.size();
  std::vector<std::complex<double>> noise;
  size_t sz = 1;
  while (sz < n) sz <<= 1;
  noise.assign(sz, {0.0, 0.0});
  for (size_t i = 0; i < sz; ++i) noise[i] = {rng.normal(), 0.0};
  dsp::fft(noise, false);
  noise[0] = 0.0;
  for (size_t k = 1; k < sz; ++k) {
    size_t sym = std::min(k, sz - k);  // mirrored shaping keeps the signal real
    noise[k] *= std::pow(static_cast<double>(sym), -spectral_alpha / 2.0);
  }
  dsp::fft(noise, true);

  double sig_pow = dsp::power(w.samples);
  double noise_pow = 0;
  for (size_t i = 0; i < n; ++i) noise_pow += noise[i].real() * noise[i].real();
  noise_pow /= static_cast<double>(std::max<size_t>(n, 1));
  Waveform out = w;
  if (noise_pow <= 0.0 || sig_pow <= 0.0) return out;
  double target_noise_pow = sig_pow / std::pow(10.0, snr_db / 10.0);
  double scale = std::sqrt(target_noise_pow / noise_pow);
  for (size_t i = 0; i < n; ++i)
    out.samples[i] = static_cast<float>(w.samples[i] + scale * noise[i].real());
  return out;
}

Waveform run_external_mp3(const Waveform& w, double bitrate_kbps, const std::string& command_template) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path();
  auto tag = std::to_string(::getpid()) + "_" + std::to_string(reinterpret_cast<uintptr_t>(&w));
  fs::path in_path = dir / ("spoofkit_codec_in_" + tag + ".wav");
  fs::path out_path = dir / ("spoofkit_codec_out_" + tag + ".wav");
  save_waveform_wav16(w, in_path.string());
  std::string cmd = command_template;
  auto substitute = [&cmd](const std::string& key, const std::string& value) {
    for (size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key))
      cmd.replace(p, key.size(), value);
  };
  substitute("{in}", in_path.string());
  substitute("{out}", out_path.string());
  substitute("{bitrate}", std::to_string(static_cast<int>(bitrate_kbps)));
  int rc = std::system(cmd.c_str());
  Waveform out;
  if (rc == 0 && fs::exists(out_path)) out = load_waveform(out_path.string(), w.sample_rate);
  std::error_code ec;
  fs::remove(in_path, ec);
  fs::remove(out_path, ec);
  if (rc != 0) throw IoError("external codec command failed (exit " + std::to_string(rc) + "): " + cmd);
  out.id = w.id;
  out.samples.resize(w.samples.size(), 0.0f);
  return out;
}

Waveform apply_codec_branch(const Waveform& w, CodecKind kind, const CodecConfig& cfg,
                            AugmentationState& state) {
  double t = kappa_t(cfg.schedule, state.kappa);
  switch (kind) {
    case CodecKind::kMp3Like: {
      double hi = lerp(cfg.bitrate_hi_start, cfg.bitrate_hi_end, t);
      double lo = lerp(cfg.bitrate_lo_start, cfg.bitrate_lo_end, t);
      double bitrate = state.rng.uniform(lo, hi);
      if (!cfg.external_mp3_command.empty()) return run_external_mp3(w, bitrate, cfg.external_mp3_command);
      return apply_mp3_like(w, bitrate);
    }
    case CodecKind::kTelephone:
      return apply_telephone_bandlimit(w);
    case CodecKind::kLowBitrateResample: {
      double hi = lerp(cfg.rate_hi_start, cfg.rate_hi_end, t);
      double lo = lerp(cfg.rate_lo_start, cfg.rate_lo_end, t);
      return apply_low_bitrate_resample(w, state.rng.uniform(lo, hi));
    }
    case CodecKind::kColouredNoise: {
      double hi = lerp(cfg.snr_hi_start, cfg.snr_hi_end, t);
      double lo = lerp(cfg.snr_lo_start, cfg.snr_lo_end, t);
      double snr = state.rng.uniform(lo, hi);
      double alpha = state.rng.uniform(0.5, 1.5);
      return apply_coloured_noise(w, snr, alpha, state.rng);
    }
  }
  throw UsageError("apply_codec_branch: bad kind");
}

std::optional<CodecKind> codec_draw(AugmentationState& state, const CodecConfig& cfg) {
  if (state.rng.uniform() >= cfg.select_probability) return std::nullopt;
  return static_cast<CodecKind>(state.rng.uniform_int(0, 3));
}

Waveform apply_codec_corruption(const Waveform& w, AugmentationState& state, const CodecConfig& cfg) {
  if (w.duration_seconds() < cfg.min_input_seconds) return w;
  auto kind = codec_draw(state, cfg);
  if (!kind) return w;
  return apply_codec_branch(w, *kind, cfg, state);
}

// ---------------------------------------------------------------------------
// effect chain
// ---------------------------------------------------------------------------

Waveform apply_gain_db(const Waveform& w, double db) {
  Waveform out = w;
  double g = std::pow(10.0, db / 20.0);
  for (float& v : out.samples) v = static_cast<float>(v * g);
  return out;
}

Waveform apply_pitch_shift(const Waveform& w, double semitones) {
  if (semitones == 0.0 || w.samples.size() < 4) return w;
  double ratio = std::pow(2.0, semitones / 12.0);
  // resample by 1/ratio (pitch moves by `ratio` when replayed at the
  // original rate), then OLA time-stretch back to the original length
  auto shifted = dsp::resample(w.samples, w.sample_rate, w.sample_rate / ratio);
  size_t target_len = w.samples.size();
  size_t src_len = shifted.size();
  if (src_len < 4) return w;

  const size_t frame = std::min<size_t>(1024, src_len);
  const size_t hop_out = frame / 4;
  double stretch = static_cast<double>(target_len) / static_cast<double>(src_len);
  double hop_in = hop_out / stretch;

  std::vector<double> acc(target_len, 0.0), wsum(target_len, 0.0);
  std::vector<double> window(frame);
  for (size_t i = 0; i < frame; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(frame));
  size_t out_pos = 0;
  double in_pos = 0.0;
  while (out_pos < target_len) {
    size_t ip = std::min(static_cast<size_t>(in_pos), src_len > frame ? src_len - frame : 0);
    for (size_t i = 0; i < frame && out_pos + i < target_len; ++i) {
      size_t si = ip + i;
      if (si >= src_len) break;
      acc[out_pos + i] += shifted[si] * window[i];
      wsum[out_pos + i] += window[i];
    }
    out_pos += hop_out;
    in_pos += hop_in;
  }
  Waveform out = w;
  for (size_t i = 0; i < target_len; ++i)
    out.samples[i] = static_cast<float>(wsum[i] > 1e-9 ? acc[i] / wsum[i] : 0.0);
  return out;
}

Waveform apply_circular_shift(const Waveform& w, size_t samples) {
  Waveform out = w;
  size_t n = w.samples.size();
  if (n == 0) return out;
  samples %= n;
  if (samples == 0) return out;
  // rotate right: out[i] = in[(i - samples) mod n]
  for (size_t i = 0; i < n; ++i) out.samples[(i + samples) % n] = w.samples[i];
  return out;
}

Waveform apply_lowpass(const Waveform& w, double cutoff_hz) {
  Waveform out = w;
  out.samples = dsp::convolve_same(w.samples, dsp::design_lowpass(cutoff_hz, w.sample_rate, 65));
  return out;
}

Waveform peak_normalize(const Waveform& w) {
  Waveform out = w;
  float peak = 0.0f;
  for (float v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0f)
    for (float& v : out.samples) v /= peak;
  return out;
}

Waveform apply_effect_chain(const Waveform& w, AugmentationState& state, const EffectChainConfig& cfg) {
  Waveform out = w;
  if (state.rng.uniform() < state.p)
    out = apply_gain_db(out, state.rng.uniform(-cfg.gain_range_db, cfg.gain_range_db));
  if (state.rng.uniform() < state.p && out.duration_seconds() >= cfg.min_input_seconds) {
    double span = std::min(cfg.pitch_semitones_per_kappa * state.kappa, cfg.pitch_cap_semitones);
    out = apply_pitch_shift(out, state.rng.uniform(-span, span));
  }
  if (state.rng.uniform() < state.p) {
    auto max_shift = static_cast<int64_t>(cfg.max_shift_fraction * static_cast<double>(out.samples.size()));
    out = apply_circular_shift(out, static_cast<size_t>(state.rng.uniform_int(0, max_shift)));
  }
  if (state.rng.uniform() < state.p)
    out = apply_lowpass(out, state.rng.uniform(cfg.lowpass_lo_hz, cfg.lowpass_hi_hz));
  return peak_normalize(out);
}

}  // namespace spoofkit
