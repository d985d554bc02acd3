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

#include "spoofkit/checkpoint.hpp"

#include <fstream>

#include "json.hpp"

namespace spoofkit {

using nlohmann::json;

namespace {

constexpr char kMagic[] = "SPKCKPT1\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

struct BlobWriter {
  std::vector<double> blob;

  int64_t append(const Tensor& t) {
    int64_t offset = static_cast<int64_t>(blob.size());
    blob.insert(blob.end(), t.vec().begin(), t.vec().end());
    return offset;
  }
};

json tensor_manifest(const std::string& name, const Tensor& t, int64_t offset) {
  return json{{"name", name}, {"shape", t.shape()}, {"offset", offset}};
}

Tensor tensor_from_manifest(const json& m, const std::vector<double>& blob) {
  std::vector<int> shape = m.at("shape").get<std::vector<int>>();
  int64_t offset = m.at("offset").get<int64_t>();
  int64_t n = shape_size(shape);
  if (offset < 0 || offset + n > static_cast<int64_t>(blob.size()))
    throw IoError("checkpoint tensor out of blob range: " + m.at("name").get<std::string>());
  std::vector<double> data(blob.begin() + offset, blob.begin() + offset + n);
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  BlobWriter blob;
  json params = json::array(), opt_m = json::array(), opt_v = json::array();
  for (const auto& [name, e] : ckpt.params) {
    json m = tensor_manifest(name, e.value, blob.append(e.value));
    m["trainable"] = e.trainable;
    params.push_back(std::move(m));
  }
  for (const auto& [name, t] : ckpt.opt_m) opt_m.push_back(tensor_manifest(name, t, blob.append(t)));
  for (const auto& [name, t] : ckpt.opt_v) opt_v.push_back(tensor_manifest(name, t, blob.append(t)));

  json header;
  header["config"] = ckpt.config_json;
  header["seed"] = ckpt.seed;
  header["epoch"] = ckpt.epoch;
  if (ckpt.best_val_eer) header["best_val_eer"] = *ckpt.best_val_eer;
  header["schedule"] = {{"triggered", ckpt.schedule.triggered},
                        {"trigger_epoch", ckpt.schedule.trigger_epoch ? json(*ckpt.schedule.trigger_epoch) : json()},
                        {"blend_lambda", ckpt.schedule.blend_lambda},
                        {"trigger_threshold", ckpt.schedule.trigger_threshold},
                        {"ramp_epochs", ckpt.schedule.ramp_epochs}};
  header["params"] = std::move(params);
  header["opt_m"] = std::move(opt_m);
  header["opt_v"] = std::move(opt_v);
  header["opt_step"] = ckpt.opt_step;

  std::string header_text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  uint64_t hlen = header_text.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(header_text.data(), static_cast<std::streamsize>(hlen));
  out.write(reinterpret_cast<const char*>(blob.blob.data()),
            static_cast<std::streamsize>(blob.blob.size() * sizeof(double)));
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[kMagicLen];
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  if (!in || std::string(magic, kMagicLen) != kMagic) throw IoError("not a spoofkit checkpoint: " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string header_text(hlen, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw IoError("truncated checkpoint header: " + path);
  std::vector<double> blob;
  {
    auto pos = in.tellg();
    in.seekg(0, std::ios::end);
    auto end = in.tellg();
    in.seekg(pos);
    size_t bytes = static_cast<size_t>(end - pos);
    if (bytes % sizeof(double) != 0) throw IoError("corrupt checkpoint blob: " + path);
    blob.resize(bytes / sizeof(double));
    in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("truncated checkpoint blob: " + path);
  }

  json header = json::parse(header_text);
  Checkpoint ckpt;
  ckpt.config_json = header.at("config").get<std::string>();
  ckpt.seed = header.at("seed").get<uint64_t>();
  ckpt.epoch = header.at("epoch").get<int>();
  if (header.contains("best_val_eer")) ckpt.best_val_eer = header["best_val_eer"].get<double>();
  const auto& s = header.at("schedule");
  ckpt.schedule.triggered = s.at("triggered").get<bool>();
  if (!s.at("trigger_epoch").is_null()) ckpt.schedule.trigger_epoch = s.at("trigger_epoch").get<int>();
  ckpt.schedule.blend_lambda = s.at("blend_lambda").get<double>();
  ckpt.schedule.trigger_threshold = s.at("trigger_threshold").get<double>();
  ckpt.schedule.ramp_epochs = s.at("ramp_epochs").get<int>();
  for (const auto& m : header.at("params"))
    ckpt.params.emplace(m.at("name").get<std::string>(),
                        Parameters::Entry{tensor_from_manifest(m, blob), m.at("trainable").get<bool>()});
  for (const auto& m : header.at("opt_m"))
    ckpt.opt_m.emplace(m.at("name").get<std::string>(), tensor_from_manifest(m, blob));
  for (const auto& m : header.at("opt_v"))
    ckpt.opt_v.emplace(m.at("name").get<std::string>(), tensor_from_manifest(m, blob));
  ckpt.opt_step = header.value("opt_step", int64_t{0});
  return ckpt;
}

void restore_parameters(const Checkpoint& ckpt, Parameters& P) {
  std::string mismatches;
  for (const auto& name : P.names()) {
    auto it = ckpt.params.find(name);
    if (it == ckpt.params.end()) {
      mismatches += "\n  missing in checkpoint: " + name;
    } else if (!(it->second.value.shape() == P.value(name).shape())) {
      mismatches += "\n  shape mismatch: " + name;
    }
  }
  for (const auto& [name, e] : ckpt.params)
    if (!P.has(name)) mismatches += "\n  unexpected in checkpoint: " + name;
  if (!mismatches.empty())
    throw ConfigError("checkpoint does not match model architecture:" + mismatches);
  for (const auto& [name, e] : ckpt.params) P.value(name) = e.value;
}

Checkpoint snapshot_parameters(const Parameters& P) {
  Checkpoint ckpt;
  for (const auto& [name, e] : P) ckpt.params.emplace(name, e);
  return ckpt;
}

}  // namespace spoofkit
