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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spoofkit/toydata.hpp"
#include "spoofkit/trainer.hpp"

namespace fs = std::filesystem;
using namespace spoofkit;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FullConfig load_config_with_overrides(const std::string& path, const std::string& preset,
                                      int64_t seed, const std::vector<std::string>& sets) {
  std::string text = read_text(path);
  for (const auto& assignment : sets) text = apply_json_override(text, assignment);
  FullConfig cfg = config_from_json_text(text);
  if (!preset.empty()) apply_preset(cfg, parse_preset(preset));
  if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
  return cfg;
}

Manifest manifest_or_die(const std::string& path, const char* which) {
  if (path.empty()) throw ConfigError(std::string("no ") + which + " manifest configured");
  return load_manifest(path);
}

int cmd_train(const std::string& config_path, const std::string& preset, int64_t seed,
              const std::vector<std::string>& sets, const std::string& resume) {
  FullConfig cfg = load_config_with_overrides(config_path, preset, seed, sets);
  Manifest train = manifest_or_die(cfg.data.train_manifest, "train");
  Manifest val;
  if (!cfg.data.val_manifest.empty()) val = load_manifest(cfg.data.val_manifest);

  Trainer trainer(cfg);
  TrainResult res = trainer.train(train, val, resume);
  for (const auto& e : res.history.epochs) {
    std::cout << "epoch " << e.epoch << "  loss " << e.train_loss;
    if (e.val_eer) std::cout << "  val_eer " << *e.val_eer * 100.0 << "%";
    std::cout << "  lr " << e.lr_last;
    if (e.p > 0) std::cout << "  p " << e.p << "  kappa " << e.kappa;
    if (e.lambda > 0) std::cout << "  lambda " << e.lambda;
    std::cout << "\n";
  }
  std::cout << "best checkpoint: " << res.best_checkpoint_path << "\n";
  std::cout << "last checkpoint: " << res.last_checkpoint_path << "\n";
  if (res.best_val_eer) std::cout << "best val EER: " << *res.best_val_eer * 100.0 << "%\n";
  return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& manifest_path,
                 const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Manifest manifest = load_manifest(manifest_path);
  ScoreSet scores = Trainer::evaluate(ckpt, manifest);
  write_scores(scores, out_path);
  std::cout << "wrote " << scores.records.size() << " scores to " << out_path << "\n";
  bool has_bona = false, has_spoof = false;
  for (const auto& r : scores.records) (r.label == Label::kBonafide ? has_bona : has_spoof) = true;
  if (has_bona && has_spoof) {
    EerResult eer = compute_eer(scores);
    std::printf("EER: %.2f%% (threshold %.6g)\n", eer.eer * 100.0, eer.threshold);
  }
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& presets_csv,
               const std::string& report_path, int64_t seed, const std::vector<std::string>& sets) {
  FullConfig cfg = load_config_with_overrides(config_path, "", seed, sets);
  Manifest train = manifest_or_die(cfg.data.train_manifest, "train");
  Manifest val = manifest_or_die(cfg.data.val_manifest, "val");

  std::vector<Preset> presets;
  if (presets_csv.empty() || presets_csv == "all") {
    presets = all_presets();
  } else {
    std::stringstream ss(presets_csv);
    std::string token;
    while (std::getline(ss, token, ',')) presets.push_back(parse_preset(token));
  }

  AblationReport report = run_ablation(cfg, presets, train, val);
  std::string text = report.to_text();
  std::cout << text;
  {
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write report: " + report_path);
    out << text;
  }
  {
    std::ofstream out(report_path + ".csv");
    if (!out) throw IoError("cannot write report csv: " + report_path + ".csv");
    out << report.to_csv();
  }
  std::cout << "report written to " << report_path << " and " << report_path << ".csv\n";
  return 0;
}

int cmd_synthdata(const std::string& out_dir, int train_per_class, int dev_per_class,
                  double duration, int64_t seed) {
  ToyDatasetSpec spec;
  spec.train_per_class = train_per_class;
  spec.dev_per_class = dev_per_class;
  spec.duration_seconds = duration;
  if (seed >= 0) spec.seed = static_cast<uint64_t>(seed);
  ToyDataset ds = make_toy_dataset(out_dir, spec);
  std::cout << "train manifest: " << ds.train_manifest << "\n";
  std::cout << "dev manifest:   " << ds.dev_manifest << "\n";
  return 0;
}

// Exports the canonical synthetic projection as an external-encoder weights
// file (the format frontend.weights_path consumes).
int cmd_export_encoder(const std::string& out_path, int fbank_bins) {
  Parameters P;
  FrontendEncoder enc;
  EncoderConfig cfg;
  cfg.kind = EncoderKind::kSynthetic;
  cfg.embedding_dim = 1024;
  cfg.fbank_bins = fbank_bins;
  cfg.init = EncoderInit::kPretrained;
  Rng rng(0);
  enc.build(P, cfg, rng);
  const Tensor& w = P.value("encoder.proj.weight");
  const Tensor& b = P.value("encoder.proj.bias");
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + out_path);
  int32_t rows = w.dim(0), cols = w.dim(1);
  out.write(reinterpret_cast<char*>(&rows), 4);
  out.write(reinterpret_cast<char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * 8));
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * 8));
  std::cout << "wrote " << rows << "x" << cols << " encoder weights to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spoofkit: configurable speech anti-spoofing trainer"};
  app.require_subcommand(1);

  std::string config_path, preset, resume, ckpt_path, manifest_path, out_path, report_path;
  std::string presets_csv = "all";
  std::vector<std::string> sets;
  int64_t seed = -1;
  int train_per_class = 64, dev_per_class = 16, fbank_bins = 40;
  double duration = 0.5;

  auto* train = app.add_subcommand("train", "train a model from a JSON config");
  train->add_option("--config", config_path, "config JSON path")->required();
  train->add_option("--preset", preset, "ablation preset overriding the config axes");
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--set", sets, "dotted config override, e.g. trainer.lr=2e-4");
  train->add_option("--resume", resume, "resume from a last.ckpt");

  auto* evaluate = app.add_subcommand("evaluate", "score a manifest with a checkpoint");
  evaluate->add_option("--checkpoint", ckpt_path, "checkpoint path")->required();
  evaluate->add_option("--manifest", manifest_path, "manifest TSV")->required();
  evaluate->add_option("--out", out_path, "output scores TSV")->required();

  auto* ablate = app.add_subcommand("ablate", "train and evaluate ablation presets");
  ablate->add_option("--config", config_path, "config JSON path")->required();
  ablate->add_option("--presets", presets_csv, "comma list or 'all'");
  ablate->add_option("--report", report_path, "report output path")->required();
  ablate->add_option("--seed", seed, "override the config seed");
  ablate->add_option("--set", sets, "dotted config override");

  auto* synthdata = app.add_subcommand("synthdata", "generate the separable toy dataset");
  synthdata->add_option("--out-dir", out_path, "output directory")->required();
  synthdata->add_option("--train-per-class", train_per_class, "train utterances per class");
  synthdata->add_option("--dev-per-class", dev_per_class, "dev utterances per class");
  synthdata->add_option("--duration", duration, "utterance length in seconds");
  synthdata->add_option("--seed", seed, "dataset seed");

  auto* export_enc = app.add_subcommand("export-encoder", "export encoder weights for external_ssl");
  export_enc->add_option("--out", out_path, "weights file path")->required();
  export_enc->add_option("--fbank-bins", fbank_bins, "filterbank bins");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, preset, seed, sets, resume);
    if (*evaluate) return cmd_evaluate(ckpt_path, manifest_path, out_path);
    if (*ablate) return cmd_ablate(config_path, presets_csv, report_path, seed, sets);
    if (*synthdata) return cmd_synthdata(out_path, train_per_class, dev_per_class, duration, seed);
    if (*export_enc) return cmd_export_encoder(out_path, fbank_bins);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
