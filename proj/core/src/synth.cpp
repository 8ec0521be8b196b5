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

#include "seqfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "seqfuse/error.hpp"
#include "seqfuse/rng.hpp"

namespace seqfuse {

namespace {

constexpr const char* kTargets[] = {"arousal", "valence"};
constexpr std::size_t kWaves = 3;

Vector smooth_curve(Rng& rng, std::size_t t) {
  double amplitude[kWaves];
  double period[kWaves];
  double phase[kWaves];
  for (std::size_t w = 0; w < kWaves; ++w) {
    amplitude[w] = rng.uniform(0.15, 0.5);
    period[w] = rng.uniform(30.0, 240.0);
    phase[w] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const double offset = rng.uniform(-0.2, 0.2);
  Vector curve(t);
  for (std::size_t j = 0; j < t; ++j) {
    double v = offset;
    for (std::size_t w = 0; w < kWaves; ++w) {
      v += amplitude[w] *
           std::sin(2.0 * std::numbers::pi * static_cast<double>(j) / period[w] + phase[w]);
    }
    curve[j] = std::clamp(v, -1.0, 1.0);
  }
  return curve;
}

}  // namespace

std::vector<LabeledSequence> synth_generate(const SynthConfig& config) {
  if (config.t_min < 2 || config.t_max < config.t_min) {
    throw Error(ErrorKind::kInvalidArgument, "synth t range must satisfy 2 <= t_min <= t_max");
  }
  if (config.dims.empty() ||
      std::any_of(config.dims.begin(), config.dims.end(), [](std::size_t d) { return d == 0; })) {
    throw Error(ErrorKind::kInvalidArgument, "synth dims must be a non-empty list of positives");
  }
  if (!(config.snr > 0.0)) throw Error(ErrorKind::kInvalidArgument, "snr must be positive");

  // Per-track readout: x = mixing * [arousal, valence] + bias + noise.
  Rng mixing_rng(derive_seed(config.seed, 0));
  std::vector<Matrix> mixing;
  std::vector<Vector> bias;
  for (std::size_t d : config.dims) {
    Matrix a(d, 2);
    for (double& v : a.values()) v = mixing_rng.normal();
    Vector b(d);
    for (double& v : b) v = 0.5 * mixing_rng.normal();
    mixing.push_back(std::move(a));
    bias.push_back(std::move(b));
  }

  const double noise_scale = 1.0 / config.snr;
  std::vector<LabeledSequence> videos;
  videos.reserve(config.n_videos);
  for (std::size_t v = 0; v < config.n_videos; ++v) {
    Rng rng(derive_seed(config.seed, v + 1));
    const std::size_t span = config.t_max - config.t_min + 1;
    const std::size_t t = config.t_min + static_cast<std::size_t>(rng.below(span));

    LabeledSequence video;
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%03zu", v);
    video.video_id = id;
    for (const char* target : kTargets) video.labels.emplace(target, smooth_curve(rng, t));
    const Vector& arousal = video.labels.at("arousal");
    const Vector& valence = video.labels.at("valence");

    for (std::size_t i = 0; i < config.dims.size(); ++i) {
      FrameTrack track;
      track.name = "track" + std::to_string(i);
      track.dim = config.dims[i];
      track.frame_len_ms = config.frame_len_ms;
      track.frames = Matrix(t, track.dim);
      for (std::size_t j = 0; j < t; ++j) {
        for (std::size_t k = 0; k < track.dim; ++k) {
          track.frames(j, k) = mixing[i](k, 0) * arousal[j] + mixing[i](k, 1) * valence[j] +
                               bias[i][k] + noise_scale * rng.normal();
        }
      }
      video.tracks.push_back(std::move(track));
    }
    videos.push_back(std::move(video));
  }
  return videos;
}

TokenTrack synth_token_track(std::uint64_t seed, std::size_t n_tokens, std::size_t dim,
                             std::int64_t horizon_ms, std::int64_t max_span_ms) {
  if (dim == 0 || horizon_ms < 1 || max_span_ms < 1) {
    throw Error(ErrorKind::kInvalidArgument, "synth_token_track needs positive sizes");
  }
  Rng rng(seed);
  TokenTrack track;
  track.name = "tokens";
  track.dim = dim;
  track.tokens.reserve(n_tokens);
  for (std::size_t n = 0; n < n_tokens; ++n) {
    TokenFeature token;
    token.start_ms = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(horizon_ms)));
    token.end_ms =
        token.start_ms + 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_span_ms)));
    token.values.resize(dim);
    for (double& x : token.values) x = rng.normal();
    track.tokens.push_back(std::move(token));
  }
  std::stable_sort(track.tokens.begin(), track.tokens.end(),
                   [](const TokenFeature& a, const TokenFeature& b) {
                     return a.start_ms < b.start_ms;
                   });
  return track;
}

}  // namespace seqfuse
