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

#include "spoofkit/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spoofkit::dsp {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

std::vector<std::complex<double>> rfft(const float* x, size_t n, size_t min_size) {
  size_t sz = next_pow2(std::max(n, std::max<size_t>(min_size, 1)));
  std::vector<std::complex<double>> a(sz, {0.0, 0.0});
  for (size_t i = 0; i < n; ++i) a[i] = {static_cast<double>(x[i]), 0.0};
  fft(a, false);
  return a;
}

std::vector<double> design_lowpass(double cutoff_hz, double sample_rate, int taps) {
  if (taps % 2 == 0) ++taps;
  double fc = cutoff_hz / sample_rate;  // normalized, cycles per sample
  int m = taps / 2;
  std::vector<double> h(static_cast<size_t>(taps));
  double sum = 0;
  for (int i = 0; i < taps; ++i) {
    double k = i - m;
    double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (taps - 1));  // Hamming
    h[static_cast<size_t>(i)] = 2.0 * fc * sinc(2.0 * fc * k) * w;
    sum += h[static_cast<size_t>(i)];
  }
  for (auto& v : h) v /= sum;  // unit DC gain
  return h;
}

std::vector<double> design_bandpass(double lo_hz, double hi_hz, double sample_rate, int taps) {
  if (taps % 2 == 0) ++taps;
  auto lp_hi = design_lowpass(hi_hz, sample_rate, taps);
  auto lp_lo = design_lowpass(lo_hz, sample_rate, taps);
  std::vector<double> h(lp_hi.size());
  for (size_t i = 0; i < h.size(); ++i) h[i] = lp_hi[i] - lp_lo[i];
  return h;
}

std::vector<double> design_multinotch(const std::vector<std::pair<double, double>>& stop_bands,
                                      double sample_rate, int taps) {
  if (taps % 2 == 0) ++taps;
  const int grid = 256;  // frequency-sampling grid (one-sided)
  std::vector<double> mag(static_cast<size_t>(grid) + 1, 1.0);
  double nyquist = sample_rate / 2.0;
  for (auto [lo, hi] : stop_bands) {
    lo = std::clamp(lo, 0.0, nyquist);
    hi = std::clamp(hi, 0.0, nyquist);
    int a = static_cast<int>(std::floor(lo / nyquist * grid));
    int b = static_cast<int>(std::ceil(hi / nyquist * grid));
    for (int i = std::max(0, a); i <= std::min(grid, b); ++i) mag[static_cast<size_t>(i)] = 0.0;
  }
  // zero-phase impulse response via inverse DCT of the magnitude samples
  int m = taps / 2;
  std::vector<double> h(static_cast<size_t>(taps), 0.0);
  for (int i = 0; i < taps; ++i) {
    double k = i - m;
    double acc = mag[0] / 2.0 + mag[static_cast<size_t>(grid)] / 2.0 * std::cos(M_PI * k);
    for (int q = 1; q < grid; ++q)
      acc += mag[static_cast<size_t>(q)] * std::cos(M_PI * k * q / grid);
    double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (taps - 1));
    h[static_cast<size_t>(i)] = acc / grid * w;
  }
  return h;
}

std::vector<float> convolve_same(const std::vector<float>& x, const std::vector<double>& fir) {
  int n = static_cast<int>(x.size());
  int taps = static_cast<int>(fir.size());
  int m = taps / 2;
  std::vector<float> y(x.size(), 0.0f);
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    int k_lo = std::max(0, i + m - (n - 1));
    int k_hi = std::min(taps - 1, i + m);
    for (int k = k_lo; k <= k_hi; ++k) acc += fir[static_cast<size_t>(k)] * x[static_cast<size_t>(i + m - k)];
    y[static_cast<size_t>(i)] = static_cast<float>(acc);
  }
  return y;
}

std::vector<float> resample(const std::vector<float>& x, double from_rate, double to_rate) {
  if (x.empty()) return {};
  if (from_rate == to_rate) return x;
  double ratio = to_rate / from_rate;
  size_t out_len = std::max<size_t>(1, static_cast<size_t>(std::floor(x.size() * ratio)));
  const double zero_crossings = 16.0;
  double fc = 0.945 * std::min(1.0, ratio);  // relative to input Nyquist
  double half_width = zero_crossings / fc;
  std::vector<float> y(out_len, 0.0f);
  int n = static_cast<int>(x.size());
  for (size_t i = 0; i < out_len; ++i) {
    double t = static_cast<double>(i) / ratio;  // position in input samples
    int k_lo = static_cast<int>(std::ceil(t - half_width));
    int k_hi = static_cast<int>(std::floor(t + half_width));
    double acc = 0;
    for (int k = std::max(0, k_lo); k <= std::min(n - 1, k_hi); ++k) {
      double d = t - k;
      double window = 0.5 * (1.0 + std::cos(M_PI * d / half_width));  // Hann
      acc += x[static_cast<size_t>(k)] * fc * sinc(fc * d) * window;
    }
    y[i] = static_cast<float>(acc);
  }
  return y;
}

double power(const std::vector<float>& x) {
  if (x.empty()) return 0.0;
  double s = 0;
  for (float v : x) s += static_cast<double>(v) * v;
  return s / static_cast<double>(x.size());
}

double band_power(const std::vector<float>& x, double sample_rate, double lo_hz, double hi_hz) {
  auto spec = rfft(x.data(), x.size());
  size_t n = spec.size();
  double bin_hz = sample_rate / static_cast<double>(n);
  double acc = 0;
  for (size_t k = 0; k <= n / 2; ++k) {
    double f = k * bin_hz;
    if (f >= lo_hz && f < hi_hz) acc += std::norm(spec[k]);
  }
  return acc;
}

}  // namespace spoofkit::dsp
