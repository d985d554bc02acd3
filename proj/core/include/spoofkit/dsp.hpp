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

#include <complex>
#include <cstdint>
#include <vector>

namespace spoofkit::dsp {

// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Real-input forward FFT zero-padded to the next power of two >= n.
std::vector<std::complex<double>> rfft(const float* x, size_t n, size_t min_size = 0);

// Windowed-sinc FIR low-pass, odd tap count, Hamming window, unit DC gain.
std::vector<double> design_lowpass(double cutoff_hz, double sample_rate, int taps);

// Band-pass as a difference of two low-passes.
std::vector<double> design_bandpass(double lo_hz, double hi_hz, double sample_rate, int taps);

// Linear-phase multi-notch FIR via frequency sampling: unit response with
// the given [lo,hi] Hz bands zeroed out, truncated to `taps` coefficients.
std::vector<double> design_multinotch(const std::vector<std::pair<double, double>>& stop_bands,
                                      double sample_rate, int taps);

// 'same' convolution with the filter's group delay removed (odd-tap FIRs).
std::vector<float> convolve_same(const std::vector<float>& x, const std::vector<double>& fir);

// Band-limited sinc resampler.
//
// Kernel constants (fixed): 16 zero crossings of half-width at the lower of
// the two rates, Hann-windowed, cutoff at 0.945 of the lower Nyquist.
std::vector<float> resample(const std::vector<float>& x, double from_rate, double to_rate);

// Mean power of a signal.
double power(const std::vector<float>& x);

// Power in [lo_hz, hi_hz) from a magnitude-squared spectrum of the signal.
double band_power(const std::vector<float>& x, double sample_rate, double lo_hz, double hi_hz);

}  // namespace spoofkit::dsp
