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

#include "spoofkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace spoofkit {

EerResult compute_eer(const ScoreSet& s) {
  int n_bona = 0, n_spoof = 0;
  for (const auto& r : s.records) {
    if (!std::isfinite(r.score)) throw UsageError("compute_eer: non-finite score for id " + r.id);
    (r.label == Label::kBonafide ? n_bona : n_spoof)++;
  }
  if (n_bona == 0 || n_spoof == 0)
    throw UsageError("compute_eer requires at least one record of each class");

  std::vector<const ScoreRecord*> sorted;
  sorted.reserve(s.records.size());
  for (const auto& r : s.records) sorted.push_back(&r);
  // descending score; ties pessimistic: the spoof enters the accepted set first
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScoreRecord* a, const ScoreRecord* b) {
    if (a->score != b->score) return a->score > b->score;
    return (a->label == Label::kSpoof) > (b->label == Label::kSpoof);
  });

  int n = static_cast<int>(sorted.size());
  // operating-point threshold: accept the top-k scores
  auto threshold_at = [&](int k) {
    if (k <= 0) return sorted[0]->score + 1.0;
    if (k >= n) return sorted[static_cast<size_t>(n) - 1]->score - 1.0;
    return 0.5 * (sorted[static_cast<size_t>(k) - 1]->score + sorted[static_cast<size_t>(k)]->score);
  };

  double prev_frr = 1.0, prev_diff = -1.0;
  int spoof_seen = 0, bona_seen = 0;
  for (int k = 1; k <= n; ++k) {
    (sorted[static_cast<size_t>(k) - 1]->label == Label::kSpoof ? spoof_seen : bona_seen)++;
    double far = static_cast<double>(spoof_seen) / n_spoof;
    double frr = 1.0 - static_cast<double>(bona_seen) / n_bona;
    double diff = far - frr;
    if (diff >= 0.0) {
      double alpha = (diff - prev_diff) > 0.0 ? -prev_diff / (diff - prev_diff) : 1.0;
      EerResult out;
      out.eer = prev_frr + alpha * (frr - prev_frr);
      out.threshold = threshold_at(k - 1) + alpha * (threshold_at(k) - threshold_at(k - 1));
      return out;
    }
    prev_frr = frr;
    prev_diff = diff;
  }
  // unreachable: the accept-all point has FAR 1, FRR 0
  return EerResult{1.0, threshold_at(n)};
}

void write_scores(const ScoreSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write score file: " + path);
  out << "id\tscore\tlabel\n";
  char buf[64];
  for (const auto& r : s.records) {
    std::snprintf(buf, sizeof(buf), "%.6g", r.score);
    out << r.id << '\t' << buf << '\t' << label_name(r.label) << '\n';
  }
  if (!out) throw IoError("failed writing score file: " + path);
}

ScoreSet read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty score file (missing header): " + path);
  ScoreSet s;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw IoError("malformed score line " + std::to_string(lineno) + " in " + path);
    ScoreRecord r;
    r.id = line.substr(0, t1);
    r.score = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
    r.label = parse_label(line.substr(t2 + 1));
    s.records.push_back(std::move(r));
  }
  return s;
}

}  // namespace spoofkit
