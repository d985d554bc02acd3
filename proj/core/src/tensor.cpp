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

#include "spoofkit/tensor.hpp"

#include <cmath>

namespace spoofkit {

int64_t shape_size(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative tensor dimension");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<size_t>(shape_size(shape_)), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (static_cast<int64_t>(data_.size()) != shape_size(shape_))
    throw std::invalid_argument("tensor data does not match shape");
}

Tensor Tensor::full(std::vector<int> shape, double v) {
  Tensor t(std::move(shape));
  for (auto& x : t.data_) x = v;
  return t;
}

Tensor Tensor::randn(std::vector<int> shape, Rng& rng, double stddev) {
  Tensor t(std::move(shape));
  for (auto& x : t.data_) x = rng.normal() * stddev;
  return t;
}

Tensor Tensor::xavier(std::vector<int> shape, Rng& rng) {
  Tensor t(shape);
  double fan_in = shape.size() >= 2 ? shape[0] : shape[0];
  double fan_out = shape.size() >= 2 ? shape[1] : shape[0];
  if (shape.size() == 4) {
    // conv weight (C_out, C_in, kh, kw)
    fan_in = static_cast<double>(shape[1]) * shape[2] * shape[3];
    fan_out = static_cast<double>(shape[0]) * shape[2] * shape[3];
  }
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& x : t.data_) x = rng.uniform(-limit, limit);
  return t;
}

bool Tensor::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

double Tensor::norm2() const {
  double s = 0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

}  // namespace spoofkit
