// Copyright 2026 The seqfuse Authors.
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

#include "seqfuse/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seqfuse/featureio.hpp"
#include "seqfuse/manifest.hpp"
#include "seqfuse/metrics.hpp"
#include "seqfuse/synth.hpp"
#include "seqfuse/training.hpp"

namespace seqfuse::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kSeedEnv = "SEQFUSE_SEED";
constexpr const char* kCheckpointFile = "model.sqf";
constexpr const char* kHistoryFile = "history.csv";

struct AlignArgs {
  std::string manifest;
  std::string out_dir;
  std::int64_t frame_len_ms = kDefaultFrameLenMs;
};

struct SynthArgs {
  std::optional<std::uint64_t> seed;
  std::size_t n_videos = 10;
  std::vector<std::size_t> dims{4, 6};
  std::size_t t_min = 100;
  std::size_t t_max = 300;
  double snr = 100.0;
  std::size_t devel = 2;
  std::size_t test = 0;
  std::string out_dir;
};

struct TrainArgs {
  std::string config;
  std::string manifest;
  std::string out_dir;
  std::string target;
  double learning_rate = 1e-3;
  double dropout_rate = 0.5;
  std::size_t max_time_step = 100;
  std::size_t embed_dim = 64;
  std::size_t hidden_units = 64;
  std::size_t head_hidden = 32;
  std::size_t epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> tracks;
};

struct EvaluateArgs {
  std::string checkpoint;
  std::string manifest;
  std::string partition = "devel";
  std::string output;
};

struct PredictArgs {
  std::string checkpoint;
  std::string manifest;
  std::string partition = "all";
  std::string out_dir;
};

// Input problems detected by the CLI itself, before any library call.
[[noreturn]] void input_error(const std::string& message) {
  throw Error(ErrorKind::kInvalidArgument, message);
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) input_error(what + " not found: " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIoFailure, "cannot create directory " + dir.string());
  }
}

void check_video_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.find_first_of("/\\") != std::string::npos) {
    input_error("video id '" + id + "' cannot be used as a directory name");
  }
}

Manifest checked_manifest(const std::string& path) {
  require_file(path, "manifest");
  Manifest manifest = load_manifest(path);
  const auto missing = missing_files(manifest);
  if (!missing.empty()) input_error("file referenced by manifest not found: " + missing.front().string());
  return manifest;
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv(kSeedEnv);
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (errno != 0 || *end != '\0' || text[0] == '-') {
    input_error(std::string(kSeedEnv) + " must be a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> default_track_order(const Manifest& manifest) {
  std::vector<std::string> order;
  if (!manifest.videos.empty()) {
    for (const auto& [name, path] : manifest.videos.front().features) order.push_back(name);
  }
  return order;
}

int cmd_align(const AlignArgs& a, std::ostream& out) {
  Manifest manifest = checked_manifest(a.manifest);
  if (a.frame_len_ms < 1) input_error("--frame-len-ms must be positive");
  manifest.frame_len_ms = a.frame_len_ms;

  const fs::path out_dir(a.out_dir);
  Manifest aligned;
  aligned.base_dir = out_dir;
  aligned.frame_len_ms = manifest.frame_len_ms;
  std::size_t files = 0;
  for (const ManifestEntry& entry : manifest.videos) {
    check_video_id(entry.video_id);
    const std::size_t n_frames = frame_count(manifest, entry);
    ManifestEntry copy;
    copy.video_id = entry.video_id;
    copy.partition = entry.partition;
    const fs::path rel = fs::path(entry.video_id);
    make_dir(out_dir / rel / "features");
    make_dir(out_dir / rel / "labels");
    for (const auto& [name, path] : entry.features) {
      const TokenTrack tokens = parse_feature_csv(manifest.resolve(path));
      const FrameTrack frames = align_tokens_to_frames(tokens, manifest.frame_len_ms, n_frames);
      const fs::path target = rel / "features" / (name + ".csv");
      write_feature_csv(frames_to_tokens(frames), out_dir / target);
      copy.features.emplace(name, target);
      ++files;
    }
    for (const auto& [name, path] : entry.labels) {
      const Vector labels = parse_label_csv(manifest.resolve(path), manifest.frame_len_ms);
      if (labels.size() != n_frames) {
        throw Error(ErrorKind::kLengthMismatch, "video '" + entry.video_id + "' label '" + name +
                                                    "' length differs from the first label file");
      }
      const fs::path target = rel / "labels" / (name + ".csv");
      write_label_csv(labels, manifest.frame_len_ms, out_dir / target);
      copy.labels.emplace(name, target);
    }
    aligned.videos.push_back(std::move(copy));
  }
  save_manifest(aligned, out_dir / "manifest.json");
  out << "aligned " << files << " feature files for " << aligned.videos.size() << " videos into "
      << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.n_videos == 0) input_error("--n-videos must be positive");
  if (a.devel + a.test > a.n_videos) input_error("--devel plus --test exceeds --n-videos");
  SynthConfig config;
  config.seed = a.seed ? *a.seed : env_seed().value_or(0);
  config.n_videos = a.n_videos;
  config.t_min = a.t_min;
  config.t_max = a.t_max;
  config.dims = a.dims;
  config.snr = a.snr;
  const std::vector<LabeledSequence> videos = synth_generate(config);

  const fs::path out_dir(a.out_dir);
  Manifest manifest;
  manifest.base_dir = out_dir;
  manifest.frame_len_ms = config.frame_len_ms;
  const std::size_t n_train = a.n_videos - a.devel - a.test;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const LabeledSequence& video = videos[v];
    ManifestEntry entry;
    entry.video_id = video.video_id;
    entry.partition = v < n_train ? "train" : v < n_train + a.devel ? "devel" : "test";
    const fs::path rel = fs::path(video.video_id);
    make_dir(out_dir / rel / "features");
    make_dir(out_dir / rel / "labels");
    for (const FrameTrack& track : video.tracks) {
      const fs::path target = rel / "features" / (track.name + ".csv");
      write_feature_csv(frames_to_tokens(track), out_dir / target);
      entry.features.emplace(track.name, target);
    }
    for (const auto& [name, values] : video.labels) {
      const fs::path target = rel / "labels" / (name + ".csv");
      write_label_csv(values, config.frame_len_ms, out_dir / target);
      entry.labels.emplace(name, target);
    }
    manifest.videos.push_back(std::move(entry));
  }
  save_manifest(manifest, out_dir / "manifest.json");
  out << "wrote " << videos.size() << " synthetic videos (seed " << config.seed << ") to "
      << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_train(const TrainArgs& a, const CLI::App& sub, std::ostream& out) {
  json doc = json::object();
  fs::path config_dir = fs::current_path();
  if (!a.config.empty()) {
    require_file(a.config, "config");
    std::ifstream in(a.config, std::ios::binary);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      input_error("config " + a.config + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) input_error("config " + a.config + " must be a JSON object");
    config_dir = fs::path(a.config).parent_path();
  }

  auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  fs::path manifest_path;
  fs::path out_dir;
  if (given("--manifest")) {
    manifest_path = a.manifest;
  } else if (doc.contains("manifest") && doc["manifest"].is_string()) {
    manifest_path = config_dir / doc["manifest"].get<std::string>();
  } else {
    input_error("missing required config field 'manifest'");
  }
  if (given("--out-dir")) {
    out_dir = a.out_dir;
  } else if (doc.contains("out_dir") && doc["out_dir"].is_string()) {
    out_dir = config_dir / doc["out_dir"].get<std::string>();
  } else {
    input_error("missing required config field 'out_dir'");
  }
  doc.erase("manifest");
  doc.erase("out_dir");

  if (given("--target")) doc["target"] = a.target;
  if (given("--lr")) doc["learning_rate"] = a.learning_rate;
  if (given("--dropout")) doc["dropout_rate"] = a.dropout_rate;
  if (given("--max-time-step")) doc["max_time_step"] = a.max_time_step;
  if (given("--embed-dim")) doc["embed_dim"] = a.embed_dim;
  if (given("--hidden-units")) doc["hidden_units"] = a.hidden_units;
  if (given("--head-hidden")) doc["head_hidden"] = a.head_hidden;
  if (given("--epochs")) doc["epochs"] = a.epochs;
  if (given("--patience")) doc["patience"] = a.patience;
  if (given("--seed")) doc["seed"] = a.seed;
  if (given("--tracks")) doc["track_order"] = a.tracks;
  if (!doc.contains("seed")) {
    if (const auto seed = env_seed()) doc["seed"] = *seed;
  }

  const Manifest manifest = checked_manifest(manifest_path.string());
  if (!doc.contains("track_order") || doc["track_order"].empty()) {
    doc["track_order"] = default_track_order(manifest);
  }
  const TrainConfig config = train_config_from_json(doc.dump());
  if (config.track_order.empty()) input_error("track_order is empty");

  const auto train_set = load_partition(manifest, "train", config.track_order);
  const auto devel_set = load_partition(manifest, "devel", config.track_order);
  const TrainResult result = train(train_set, devel_set, config);

  make_dir(out_dir);
  save_checkpoint(result.checkpoint, out_dir / kCheckpointFile);
  write_history_csv(result.history, out_dir / kHistoryFile);
  out << "trained " << result.history.size() << " epochs; best devel CCC "
      << format_double(result.checkpoint.best_devel_ccc) << " at epoch "
      << result.checkpoint.epoch << "; wrote " << (out_dir / kCheckpointFile).string() << "\n";
  return kExitOk;
}

std::vector<std::string> track_order_of(const Checkpoint& ckpt) {
  std::vector<std::string> order;
  for (const TrackSpec& t : ckpt.tracks) order.push_back(t.name);
  return order;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  require_file(a.checkpoint, "checkpoint");
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const Manifest manifest = checked_manifest(a.manifest);
  const auto dataset = load_partition(manifest, a.partition, track_order_of(ckpt));
  const CccReport report = evaluate(ckpt, dataset, ckpt.config.target);
  for (const std::string& id : report.degenerate_videos) {
    err << "warning: video '" << id << "' has no defined per-video CCC\n";
  }
  const std::string text = report_to_json(report);
  if (a.output.empty()) {
    out << text;
    err << report_summary(report) << "\n";
  } else {
    const fs::path path(a.output);
    if (path.has_parent_path()) make_dir(path.parent_path());
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
    file << text;
    file.flush();
    if (!file) throw Error(ErrorKind::kIoFailure, "write failed for " + path.string());
    out << report_summary(report) << "\n";
  }
  return kExitOk;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  require_file(a.checkpoint, "checkpoint");
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const Manifest manifest = checked_manifest(a.manifest);
  const auto dataset = load_partition(manifest, a.partition, track_order_of(ckpt));
  check_tracks(ckpt, dataset);

  const fs::path out_dir(a.out_dir);
  make_dir(out_dir);
  for (const FusedSequence& seq : dataset) {
    check_video_id(seq.video_id);
    Vector predictions = predict(ckpt.model, seq.data);
    for (double& p : predictions) p = std::clamp(p, -1.0, 1.0);
    write_label_csv(predictions, manifest.frame_len_ms, out_dir / (seq.video_id + ".csv"),
                    "prediction");
  }
  out << "wrote predictions for " << dataset.size() << " videos to " << out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIoFailure:
      return kExitIoError;
    case ErrorKind::kTraceMismatch:
    case ErrorKind::kShapeMismatch:
      return kExitInternalError;
    default:
      return kExitInputError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"seqfuse: multimodal frame alignment, LSTM regression and CCC evaluation",
               "seqfuse"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  AlignArgs align;
  CLI::App* align_cmd = app.add_subcommand("align", "Average token features onto fixed frames");
  align_cmd->add_option("--manifest", align.manifest, "Dataset manifest JSON")->required();
  align_cmd->add_option("--out-dir", align.out_dir, "Directory for aligned CSVs and manifest")
      ->required();
  align_cmd->add_option("--frame-len-ms", align.frame_len_ms, "Frame length in milliseconds");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a learnable synthetic dataset");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed (default: $SEQFUSE_SEED or 0)");
  synth_cmd->add_option("--n-videos", synth.n_videos, "Number of videos");
  synth_cmd->add_option("--dims", synth.dims, "Per-track feature dims")->delimiter(',');
  synth_cmd->add_option("--t-min", synth.t_min, "Minimum frames per video");
  synth_cmd->add_option("--t-max", synth.t_max, "Maximum frames per video");
  synth_cmd->add_option("--snr", synth.snr, "Signal-to-noise ratio (noise sd = 1/snr)");
  synth_cmd->add_option("--devel", synth.devel, "Videos assigned to the devel partition");
  synth_cmd->add_option("--test", synth.test, "Videos assigned to the test partition");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train an LSTM regressor; JSON config fields are overridden by flags");
  train_cmd->add_option("--config", tr.config, "Run config JSON (TrainConfig + manifest, out_dir)");
  train_cmd->add_option("--manifest", tr.manifest, "Dataset manifest JSON");
  train_cmd->add_option("--out-dir", tr.out_dir, "Directory for model.sqf and history.csv");
  train_cmd->add_option("--target", tr.target, "Label to regress (arousal|valence)");
  train_cmd->add_option("--lr", tr.learning_rate, "Adam learning rate");
  train_cmd->add_option("--dropout", tr.dropout_rate, "Dropout rate");
  train_cmd->add_option("--max-time-step", tr.max_time_step, "Frames per training chunk");
  train_cmd->add_option("--embed-dim", tr.embed_dim, "Projection width");
  train_cmd->add_option("--hidden-units", tr.hidden_units, "LSTM hidden units");
  train_cmd->add_option("--head-hidden", tr.head_hidden, "Regression head hidden width");
  train_cmd->add_option("--epochs", tr.epochs, "Maximum epochs");
  train_cmd->add_option("--patience", tr.patience, "Epochs without devel improvement before stopping");
  train_cmd->add_option("--seed", tr.seed, "Seed (config, then $SEQFUSE_SEED, then 0)");
  train_cmd->add_option("--tracks", tr.tracks, "Track order for fusion")->delimiter(',');

  EvaluateArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint by CCC");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--manifest", ev.manifest, "Dataset manifest JSON")->required();
  eval_cmd->add_option("--partition", ev.partition, "train|devel|test|all");
  eval_cmd->add_option("--output", ev.output, "Write the JSON report here instead of stdout");

  PredictArgs pr;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Write per-video prediction CSVs");
  predict_cmd->add_option("--checkpoint", pr.checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--manifest", pr.manifest, "Dataset manifest JSON")->required();
  predict_cmd->add_option("--partition", pr.partition, "train|devel|test|all");
  predict_cmd->add_option("--out-dir", pr.out_dir, "Output directory")->required();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("seqfuse");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    if (*align_cmd) return cmd_align(align, out);
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*train_cmd) return cmd_train(tr, *train_cmd, out);
    if (*eval_cmd) return cmd_evaluate(ev, out, err);
    if (*predict_cmd) return cmd_predict(pr, out);
  } catch (const Error& e) {
    err << "seqfuse: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "seqfuse: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    err << "seqfuse: internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace seqfuse::cli
