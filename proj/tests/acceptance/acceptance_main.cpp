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

// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles/oracles.hpp"
#include "seqfuse/checkpoint.hpp"
#include "seqfuse/cli.hpp"
#include "seqfuse/error.hpp"
#include "seqfuse/featureio.hpp"
#include "seqfuse/manifest.hpp"
#include "seqfuse/metrics.hpp"
#include "seqfuse/rng.hpp"
#include "seqfuse/synth.hpp"
#include "seqfuse/training.hpp"
#include "test_util.hpp"

namespace seqfuse {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Gradients near zero are compared against an absolute floor of 1e-6 because
// central differences at step 1e-5 carry roundoff around 1e-11.
Outcome gradient_correctness() {
  const auto start = Clock::now();
  const ModelDims dims{3, 3, 4, 3};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, 77));
    const Model m = init_model(seed, dims);
    const Matrix x = random_matrix(rng, 7, dims.input);
    const Vector y = random_vector(rng, 7, 0.5);
    const Gradients g = backward(m, forward(m, x), y);
    const auto numeric = oracle::finite_difference_gradient(
        m, [&](const Model& mm) { return mse_loss(predict(mm, x), y); }, 1e-5);
    const auto blocks = g.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t i = 0; i < blocks[b].size(); ++i) {
        const double a = blocks[b][i];
        const double n = numeric[b][i];
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}));
      }
    }
  }
  const double secs = seconds_since(start);
  return {worst < 1e-4 && secs < 60.0, fmt("max relative error %.3g, %.2f s", worst, secs)};
}

Outcome ccc_oracle() {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(499);
    Vector x(n), y(n);
    const double mx = rng.uniform(-1, 1), my = rng.uniform(-1, 1);
    const double rho = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = mx + rng.normal();
      y[i] = my + rho * x[i] + rng.uniform(0.1, 1.0) * rng.normal();
    }
    worst = std::max(worst, std::abs(ccc(x, y) - oracle::direct_ccc(x, y)));
  }
  double identity = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(499);
    Vector x = random_vector(rng, n);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : x) v -= mean;
    Vector flipped = x;
    for (double& v : flipped) v = -v;
    const Vector constant(n, rng.uniform(-1, 1));
    identity = std::max({identity, std::abs(ccc(x, x) - 1.0), std::abs(ccc(x, flipped) + 1.0),
                         std::abs(ccc(constant, x)), std::abs(ccc(x, constant))});
  }
  return {worst < 1e-10 && identity < 1e-12,
          fmt("max |ccc - oracle| %.3g, identity error %.3g", worst, identity)};
}

Outcome alignment_oracle() {
  std::size_t mismatches = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::int64_t len = seed % 3 == 0 ? 250 : 10 + static_cast<std::int64_t>(rng.below(400));
    const TokenTrack track = synth_token_track(seed, 1 + rng.below(60), 1 + rng.below(5),
                                               20'000, 1 + static_cast<std::int64_t>(rng.below(900)));
    const std::size_t n = 1 + rng.below(120);
    if (align_tokens_to_frames(track, len, n).frames != oracle::brute_force_align(track, len, n)) {
      ++mismatches;
    }
  }

  std::size_t tiling_errors = 0;
  std::size_t gap_errors = 0;
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    TokenTrack tiles{"t", 3, {}};
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t j = 0; j < n; ++j) {
      tiles.tokens.push_back({static_cast<std::int64_t>(j) * 250,
                              static_cast<std::int64_t>(j + 1) * 250, random_vector(rng, 3)});
    }
    const FrameTrack f = align_tokens_to_frames(tiles, 250, n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = f.frames.row(j);
      if (!std::equal(row.begin(), row.end(), tiles.tokens[j].values.begin())) ++tiling_errors;
    }
    // Keep only every third tile; frames with no token must be zero.
    TokenTrack sparse{"s", 3, {}};
    for (std::size_t j = 0; j < n; j += 3) sparse.tokens.push_back(tiles.tokens[j]);
    const FrameTrack g = align_tokens_to_frames(sparse, 250, n + 5);
    for (std::size_t j = 0; j < n + 5; ++j) {
      if (j % 3 == 0 && j < n) continue;
      for (double v : g.frames.row(j)) gap_errors += v != 0.0;
    }
  }
  return {mismatches == 0 && tiling_errors == 0 && gap_errors == 0,
          fmt("%zu/200 layouts differ, %zu tiling errors, %zu non-zero gap entries", mismatches,
              tiling_errors, gap_errors)};
}

TrainConfig trainability_config(const std::string& target) {
  TrainConfig c;
  c.target = target;
  c.embed_dim = 16;
  c.hidden_units = 32;
  c.head_hidden = 16;
  c.learning_rate = 1e-3;
  c.epochs = 300;
  c.seed = 3;
  return c;
}

Outcome trainability() {
  const auto start = Clock::now();
  SynthConfig sc;
  sc.seed = 3;
  sc.n_videos = 10;
  sc.snr = 100;
  sc.dims = {4, 6};
  std::vector<FusedSequence> train_set, devel_set;
  const auto videos = synth_generate(sc);
  for (std::size_t v = 0; v < videos.size(); ++v) {
    (v < 8 ? train_set : devel_set)
        .push_back(fuse(videos[v].tracks, videos[v].labels, videos[v].video_id));
  }
  std::string detail;
  bool pass = true;
  for (const char* target : {"arousal", "valence"}) {
    const TrainResult r = train(train_set, devel_set, trainability_config(target));
    pass = pass && r.checkpoint.best_devel_ccc >= 0.95;
    detail += fmt("%s %.4f (epoch %zu of %zu); ", target, r.checkpoint.best_devel_ccc,
                  r.checkpoint.epoch, r.history.size());
  }
  const double secs = seconds_since(start);
  return {pass && secs < 300.0, detail + fmt("%.1f s", secs)};
}

struct PipelineOutput {
  std::string checkpoint;
  std::string report;
  bool ok = false;
};

PipelineOutput pipeline(const fs::path& root, const std::string& seed) {
  PipelineOutput o;
  const std::string raw = (root / "raw").string();
  const std::string aligned = (root / "aligned").string();
  const std::string run = (root / "run").string();
  if (cli({"synth", "--seed", seed, "--n-videos", "5", "--devel", "1", "--t-min", "60", "--t-max",
           "150", "--out-dir", raw}) != 0) return o;
  if (cli({"align", "--manifest", raw + "/manifest.json", "--out-dir", aligned}) != 0) return o;
  if (cli({"train", "--manifest", aligned + "/manifest.json", "--out-dir", run, "--target", "valence",
           "--embed-dim", "8", "--hidden-units", "8", "--head-hidden", "4", "--epochs", "5",
           "--seed", seed}) != 0) return o;
  if (cli({"evaluate", "--checkpoint", run + "/model.sqf", "--manifest", aligned + "/manifest.json",
           "--output", run + "/report.json"}) != 0) return o;
  o.checkpoint = read_file(run + "/model.sqf");
  o.report = read_file(run + "/report.json");
  o.ok = !o.checkpoint.empty() && !o.report.empty();
  return o;
}

Outcome determinism() {
  TempDir a, b, c;
  const PipelineOutput x = pipeline(a.path(), "41");
  const PipelineOutput y = pipeline(b.path(), "41");
  const PipelineOutput z = pipeline(c.path(), "42");
  const bool same = x.ok && y.ok && x.checkpoint == y.checkpoint && x.report == y.report;
  const bool differs = z.ok && z.checkpoint != x.checkpoint;
  return {same && differs, fmt("equal seeds identical: %s; different seed differs: %s",
                               same ? "yes" : "no", differs ? "yes" : "no")};
}

Outcome chunking_equivalence() {
  SynthConfig sc;
  sc.seed = 8;
  sc.n_videos = 5;
  sc.t_min = 10;
  sc.t_max = 100;
  std::vector<FusedSequence> data;
  for (const auto& v : synth_generate(sc)) data.push_back(fuse(v.tracks, v.labels, v.video_id));
  const std::vector<FusedSequence> train_set(data.begin(), data.begin() + 4);
  const std::vector<FusedSequence> devel_set(data.begin() + 4, data.end());
  TrainConfig on;
  on.target = "arousal";
  on.embed_dim = 6;
  on.hidden_units = 6;
  on.head_hidden = 4;
  on.seed = 5;
  on.patience = 1000;
  bool trajectories = true;
  for (std::size_t epochs = 1; epochs <= 6; ++epochs) {
    on.epochs = epochs;
    TrainConfig off = on;
    off.chunking = false;
    const TrainResult a = train(train_set, devel_set, on);
    const TrainResult b = train(train_set, devel_set, off);
    trajectories = trajectories && a.history == b.history &&
                   testing::bitwise_equal(a.checkpoint.model, b.checkpoint.model);
  }

  FusedSequence long_seq = data.front();
  long_seq.data = Matrix(250, 2);
  Vector labels(250);
  for (std::size_t j = 0; j < 250; ++j) {
    long_seq.data(j, 0) = static_cast<double>(j);
    long_seq.data(j, 1) = -static_cast<double>(j);
    labels[j] = std::sin(static_cast<double>(j));
  }
  long_seq.labels = {{"arousal", labels}};
  const auto chunks = chunk(long_seq, "arousal", 100);
  std::vector<std::size_t> lengths;
  std::vector<double> rows, joined;
  for (const Chunk& c : chunks) {
    lengths.push_back(c.inputs.rows());
    rows.insert(rows.end(), c.inputs.values().begin(), c.inputs.values().end());
    joined.insert(joined.end(), c.labels.begin(), c.labels.end());
  }
  const auto all = long_seq.data.values();
  const bool split = lengths == std::vector<std::size_t>{100, 100, 50} &&
                     rows == std::vector<double>(all.begin(), all.end()) && joined == labels;
  return {trajectories && split, fmt("trajectories identical: %s; 250 -> %s",
                                     trajectories ? "yes" : "no", split ? "100/100/50" : "wrong")};
}

Outcome checkpoint_round_trip() {
  std::size_t lossy = 0;
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    Checkpoint ckpt;
    ckpt.model = init_model(seed, {1 + rng.below(8), 1 + rng.below(8), 1 + rng.below(8),
                                   1 + rng.below(8)});
    for (auto block : ckpt.model.blocks()) {
      for (double& v : block) v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
    }
    ckpt.config.target = seed % 2 ? "arousal" : "valence";
    ckpt.config.seed = rng.next_u64();
    ckpt.config.embed_dim = ckpt.model.dims().embed;
    ckpt.config.hidden_units = ckpt.model.dims().hidden;
    ckpt.config.head_hidden = ckpt.model.dims().head;
    ckpt.tracks = {{"t", ckpt.model.dims().input}};
    ckpt.best_devel_ccc = rng.uniform(-1, 1);
    ckpt.epoch = seed;
    const fs::path path = dir / "m.sqf";
    save_checkpoint(ckpt, path);
    const Checkpoint back = load_checkpoint(path);
    if (!testing::bitwise_equal(back.model, ckpt.model) || back.config != ckpt.config ||
        back.tracks != ckpt.tracks || back.best_devel_ccc != ckpt.best_devel_ccc ||
        back.epoch != ckpt.epoch || read_file(path) != serialize_checkpoint(back)) {
      ++lossy;
    }
  }

  // Rejection goes through the command line so the exit code is what is checked.
  cli({"synth", "--seed", "1", "--n-videos", "3", "--devel", "1", "--t-min", "20", "--t-max", "30",
       "--out-dir", (dir / "d").string()});
  const std::string manifest = (dir / "d/manifest.json").string();
  cli({"train", "--manifest", manifest, "--out-dir", (dir / "r").string(), "--target", "arousal",
       "--epochs", "1", "--embed-dim", "3", "--hidden-units", "3", "--head-hidden", "2"});
  const std::string good = read_file(dir / "r/model.sqf");
  std::string version2 = good;
  version2[3] = '2';
  std::string flipped = good;
  flipped[flipped.size() / 3] ^= 0x5a;
  write_file(dir / "version.sqf", version2);
  write_file(dir / "trunc.sqf", good.substr(0, good.size() - 8));
  write_file(dir / "garbage.sqf", "SQF1 but nothing else");
  write_file(dir / "flipped.sqf", flipped);
  std::string codes;
  bool rejected = cli({"evaluate", "--checkpoint", (dir / "r/model.sqf").string(), "--manifest",
                       manifest}) == 0;
  for (const char* name : {"version.sqf", "trunc.sqf", "garbage.sqf"}) {
    const int code = cli({"evaluate", "--checkpoint", (dir / name).string(), "--manifest", manifest});
    rejected = rejected && code == 2;
    codes += fmt("%s=%d ", name, code);
  }
  // A flipped payload byte changes a parameter, not the structure; it must
  // either load or be rejected as corrupt, never crash.
  const int flip_code = cli({"evaluate", "--checkpoint", (dir / "flipped.sqf").string(),
                             "--manifest", manifest});
  codes += fmt("flipped.sqf=%d", flip_code);
  rejected = rejected && (flip_code == 0 || flip_code == 2);
  return {lossy == 0 && rejected, fmt("%zu/100 lossy; exit codes %s", lossy, codes.c_str())};
}

Outcome cross_command_consistency() {
  TempDir dir;
  const std::string data = (dir / "d").string();
  const std::string run = (dir / "r").string();
  if (cli({"synth", "--seed", "3", "--n-videos", "10", "--devel", "2", "--out-dir", data}) != 0 ||
      cli({"train", "--manifest", data + "/manifest.json", "--out-dir", run, "--target", "arousal",
           "--embed-dim", "16", "--hidden-units", "32", "--head-hidden", "16", "--epochs", "300",
           "--seed", "3"}) != 0 ||
      cli({"evaluate", "--checkpoint", run + "/model.sqf", "--manifest", data + "/manifest.json",
           "--output", run + "/report.json"}) != 0 ||
      cli({"predict", "--checkpoint", run + "/model.sqf", "--manifest", data + "/manifest.json",
           "--partition", "devel", "--out-dir", run + "/pred"}) != 0) {
    return {false, "pipeline failed"};
  }
  const double reported =
      nlohmann::json::parse(read_file(run + "/report.json"))["concatenated_ccc"].get<double>();
  const Manifest manifest = load_manifest(data + "/manifest.json");
  Vector pred, gold;
  bool clamped = false;
  for (const ManifestEntry* e : manifest.partition("devel")) {
    const Vector p = parse_label_csv(fs::path(run) / "pred" / (e->video_id + ".csv"));
    const Vector g = parse_label_csv(manifest.resolve(e->labels.at("arousal")));
    for (double v : p) clamped = clamped || std::abs(v) >= 1.0;
    pred.insert(pred.end(), p.begin(), p.end());
    gold.insert(gold.end(), g.begin(), g.end());
  }
  const double offline = ccc(pred, gold);
  const double diff = std::abs(offline - reported);
  return {diff < 1e-9 && !clamped, fmt("offline %.12f vs reported %.12f (|diff| %.3g)%s", offline,
                                       reported, diff, clamped ? ", clamping hit" : "")};
}

}  // namespace
}  // namespace seqfuse

int main() {
  using namespace seqfuse;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"CCC oracle equivalence", ccc_oracle},
      {"alignment oracle equivalence", alignment_oracle},
      {"trainability", trainability},
      {"determinism", determinism},
      {"chunking equivalence", chunking_equivalence},
      {"checkpoint round trip", checkpoint_round_trip},
      {"cross-command consistency", cross_command_consistency},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
