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

#include "spoofkit/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "spoofkit/dsp.hpp"

namespace spoofkit {

namespace fs = std::filesystem;

Label parse_label(const std::string& token) {
  if (token == "bonafide") return Label::kBonafide;
  if (token == "spoof") return Label::kSpoof;
  throw ConfigError("unknown label token '" + token + "' (expected bonafide|spoof)");
}

std::string label_name(Label l) { return l == Label::kBonafide ? "bonafide" : "spoof"; }

std::string Manifest::resolve_path(const ManifestEntry& e) const {
  fs::path p(e.path);
  if (p.is_absolute() || base_dir.empty()) return e.path;
  return (fs::path(base_dir) / p).string();
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  Manifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    size_t tab1 = line.find('\t');
    size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos)
      throw ConfigError("malformed manifest line " + std::to_string(lineno) + " in " + path +
                        " (expected <id>\\t<path>\\t<label>)");
    ManifestEntry e;
    e.id = line.substr(0, tab1);
    e.path = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string label_tok = line.substr(tab2 + 1);
    if (e.id.empty() || e.path.empty())
      throw ConfigError("malformed manifest line " + std::to_string(lineno) + " in " + path);
    try {
      e.label = parse_label(label_tok);
    } catch (const ConfigError&) {
      throw ConfigError("line " + std::to_string(lineno) + " in " + path + ": unknown label token '" +
                        label_tok + "'");
    }
    if (!seen.insert(e.id).second) throw ConfigError("duplicate id " + e.id + " in manifest " + path);
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path);
  for (const auto& e : m.entries) out << e.id << '\t' << e.path << '\t' << label_name(e.label) << '\n';
}

namespace {

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) | (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

Waveform load_waveform(const std::string& path, int target_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path);

  char riff[4], wave[4];
  in.read(riff, 4);
  read_u32(in);  // riff size
  in.read(wave, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  std::vector<float> mono;
  bool got_fmt = false, got_data = false;

  while (in && !got_data) {
    char tag[4];
    in.read(tag, 4);
    if (!in) break;
    uint32_t chunk_size = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      got_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!got_fmt) throw IoError("WAV data chunk before fmt chunk: " + path);
      if (channels == 0) throw IoError("WAV with zero channels: " + path);
      if (format != 1 && format != 3) throw IoError("unsupported WAV format (PCM/float only): " + path);
      uint32_t bytes_per_sample = bits / 8;
      if (bytes_per_sample == 0) throw IoError("corrupt WAV fmt chunk: " + path);
      uint64_t frames = chunk_size / (static_cast<uint64_t>(bytes_per_sample) * channels);
      std::vector<char> raw(chunk_size);
      in.read(raw.data(), chunk_size);
      if (static_cast<uint32_t>(in.gcount()) != chunk_size) throw IoError("truncated WAV data: " + path);
      mono.resize(frames, 0.0f);
      const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
      for (uint64_t fidx = 0; fidx < frames; ++fidx) {
        double acc = 0;
        for (uint16_t c = 0; c < channels; ++c) {
          const unsigned char* s = p + (fidx * channels + c) * bytes_per_sample;
          double v = 0;
          if (format == 3 && bits == 32) {
            float fv;
            std::memcpy(&fv, s, 4);
            v = fv;
          } else if (format == 1 && bits == 16) {
            int16_t iv = static_cast<int16_t>(s[0] | (s[1] << 8));
            v = iv / 32768.0;
          } else if (format == 1 && bits == 24) {
            int32_t iv = static_cast<int32_t>(s[0] | (s[1] << 8) | (s[2] << 16));
            if (iv & 0x800000) iv |= ~0xFFFFFF;
            v = iv / 8388608.0;
          } else if (format == 1 && bits == 32) {
            int32_t iv;
            std::memcpy(&iv, s, 4);
            v = iv / 2147483648.0;
          } else {
            throw IoError("unsupported WAV bit depth " + std::to_string(bits) + ": " + path);
          }
          acc += v;
        }
        mono[fidx] = static_cast<float>(acc / channels);
      }
      got_data = true;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  if (!got_data) throw IoError("WAV file has no data chunk: " + path);
  if (mono.empty()) throw IoError("zero-length audio: " + path);

  Waveform w;
  w.sample_rate = target_rate;
  if (static_cast<int>(rate) != target_rate)
    w.samples = dsp::resample(mono, static_cast<double>(rate), static_cast<double>(target_rate));
  else
    w.samples = std::move(mono);
  if (w.samples.empty()) throw IoError("audio too short to resample: " + path);
  for (float v : w.samples)
    if (!std::isfinite(v)) throw IoError("non-finite sample in " + path);
  return w;
}

void save_waveform_wav16(const Waveform& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write WAV: " + path);
  uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(w.sample_rate));
  write_u32(out, static_cast<uint32_t>(w.sample_rate * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (float v : w.samples) {
    double c = std::clamp(static_cast<double>(v), -1.0, 1.0);
    int16_t iv = static_cast<int16_t>(std::lrint(c * 32767.0));
    write_u16(out, static_cast<uint16_t>(iv));
  }
  if (!out) throw IoError("failed writing WAV: " + path);
}

}  // namespace spoofkit
