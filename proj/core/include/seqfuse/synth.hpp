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

#ifndef SEQFUSE_SYNTH_HPP_
#define SEQFUSE_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "seqfuse/featureio.hpp"

namespace seqfuse {

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_videos = 1;
  std::size_t t_min = 100;  // frames, inclusive
  std::size_t t_max = 300;  // frames, inclusive
  std::vector<std::size_t> dims{4, 6};
  double snr = 100.0;
  std::int64_t frame_len_ms = kDefaultFrameLenMs;
};

/// Learnable synthetic videos. Each video gets "arousal" and "valence"
/// labels built as clipped sums of three slow sinusoids; track i is a fixed
/// (per seed, shared across videos) affine image of the two label curves
/// plus N(0, 1/snr^2) noise. Tracks are named "track0", "track1", ...
/// Output is a pure function of the config.
std::vector<LabeledSequence> synth_generate(const SynthConfig& config);

/// Random token layout for parser and alignment tests: sorted starts,
/// spans of 1..max_span_ms that may overlap or leave gaps.
TokenTrack synth_token_track(std::uint64_t seed, std::size_t n_tokens, std::size_t dim,
                             std::int64_t horizon_ms, std::int64_t max_span_ms);

}  // namespace seqfuse

#endif  // SEQFUSE_SYNTH_HPP_
