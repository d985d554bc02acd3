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

#include <map>
#include <optional>
#include <string>

#include "spoofkit/loss.hpp"
#include "spoofkit/nn.hpp"

namespace spoofkit {

// Everything needed to either resume training or evaluate: parameters,
// optimizer moments, schedule state and the full config. Tensor payloads
// are raw little-endian doubles, so save -> load -> evaluate is
// bit-identical.
struct Checkpoint {
  std::string config_json;
  uint64_t seed = 0;
  int epoch = -1;  // last completed epoch
  std::optional<double> best_val_eer;
  LossScheduleState schedule;
  std::map<std::string, Parameters::Entry> params;
  std::map<std::string, Tensor> opt_m, opt_v;
  int64_t opt_step = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint tensors into an already-built parameter set; throws
// ConfigError listing every mismatched or missing parameter name.
void restore_parameters(const Checkpoint& ckpt, Parameters& P);

Checkpoint snapshot_parameters(const Parameters& P);  // params only

}  // namespace spoofkit
