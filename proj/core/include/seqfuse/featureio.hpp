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

#ifndef SEQFUSE_FEATUREIO_HPP_
#define SEQFUSE_FEATUREIO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqfuse/matrix.hpp"

namespace seqfuse {

inline constexpr std::int64_t kDefaultFrameLenMs = 250;

/// One token's feature vector over the half-open span [start_ms, end_ms).
struct TokenFeature {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  Vector values;

  bool operator==(const TokenFeature&) const = default;
};

/// Token-level features of one modality for one video. Tokens are kept
/// sorted by start_ms; spans may overlap.
struct TokenTrack {
  std::string name;
  std::size_t dim = 0;
  std::vector<TokenFeature> tokens;

  bool operator==(const TokenTrack&) const = default;
};

/// Frame-level features: row j covers [j * frame_len_ms, (j + 1) * frame_len_ms).
struct FrameTrack {
  std::string name;
  std::size_t dim = 0;
  std::int64_t frame_len_ms = kDefaultFrameLenMs;
  Matrix frames;

  std::size_t n_frames() const noexcept { return frames.rows(); }
  bool operator==(const FrameTrack&) const = default;
};

/// Target name ("arousal", "valence") to per-frame labels in [-1, 1].
using LabelMap = std::map<std::string, Vector>;

struct LabeledSequence {
  std::string video_id;
  std::vector<FrameTrack> tracks;
  LabelMap labels;

  std::size_t n_frames() const noexcept {
    return tracks.empty() ? 0 : tracks.front().n_frames();
  }
};

/// Frame-wise concatenation of K tracks. Column block i holds track i, in
/// the order recorded in track_names.
struct FusedSequence {
  std::string video_id;
  Matrix data;
  LabelMap labels;
  std::vector<std::string> track_names;
  std::vector<std::size_t> track_dims;

  std::size_t n_frames() const noexcept { return data.rows(); }
};

// Feature CSV: header `start_ms,end_ms,<d feature columns>`, one token per
// row. Feature column names are not interpreted. The track name defaults to
// the file stem.
TokenTrack parse_feature_csv(const std::filesystem::path& path,
                             std::optional<std::size_t> expected_dim = std::nullopt);
TokenTrack parse_feature_csv(std::istream& in, std::string track_name,
                             std::optional<std::size_t> expected_dim = std::nullopt,
                             std::string_view source = "<stream>");

void write_feature_csv(const TokenTrack& track, std::ostream& out);
void write_feature_csv(const TokenTrack& track, const std::filesystem::path& path);

// Label CSV: header `frame_ms,value`; row j must have frame_ms = j * frame_len_ms.
Vector parse_label_csv(const std::filesystem::path& path,
                       std::int64_t frame_len_ms = kDefaultFrameLenMs);
Vector parse_label_csv(std::istream& in, std::int64_t frame_len_ms,
                       std::string_view source = "<stream>");

void write_label_csv(std::span<const double> values, std::int64_t frame_len_ms,
                     std::ostream& out, std::string_view value_column = "value");
void write_label_csv(std::span<const double> values, std::int64_t frame_len_ms,
                     const std::filesystem::path& path,
                     std::string_view value_column = "value");

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Averages every token whose span intersects a frame (half-open, integer
/// milliseconds), unweighted. Frames with no overlapping token are zero.
/// Tokens are summed in (start, end, values) order, so the result does not
/// depend on the order of track.tokens. Tokens past n_frames are ignored.
FrameTrack align_tokens_to_frames(const TokenTrack& track, std::int64_t frame_len_ms,
                                  std::size_t n_frames);

/// Writes each frame back as a token spanning exactly that frame.
TokenTrack frames_to_tokens(const FrameTrack& track);

/// Horizontal concatenation of tracks, frame by frame, in list order.
FusedSequence fuse(std::span<const FrameTrack> tracks, LabelMap labels,
                   std::string video_id = {});

/// Extracts column block `index` of a fused sequence.
Matrix track_block(const FusedSequence& fused, std::size_t index);

}  // namespace seqfuse

#endif  // SEQFUSE_FEATUREIO_HPP_
