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

#include "spoofkit/audio_io.hpp"

namespace spoofkit {

struct ScoreRecord {
  std::string id;
  double score = 0.0;  // higher means more bonafide
  Label label = Label::kBonafide;
};

struct ScoreSet {
  std::vector<ScoreRecord> records;
};

struct EerResult {
  double eer = 0.0;       // fraction in [0,1]
  double threshold = 0.0;
};

// Equal error rate by sorting scores (ties: spoof counted first) and
// linearly interpolating the FAR/FRR crossing. Throws UsageError unless
// both classes are present.
EerResult compute_eer(const ScoreSet& s);

// TSV score files: header line `id\tscore\tlabel`, scores with 6
// significant digits.
void write_scores(const ScoreSet& s, const std::string& path);
ScoreSet read_scores(const std::string& path);

}  // namespace spoofkit
