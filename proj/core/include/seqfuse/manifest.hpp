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

#ifndef SEQFUSE_MANIFEST_HPP_
#define SEQFUSE_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqfuse/featureio.hpp"

namespace seqfuse {

inline constexpr const char* kPartitionNames[] = {"train", "devel", "test"};

struct ManifestEntry {
  std::string video_id;
  std::string partition;
  // Paths are stored as written in the file; resolve() makes them absolute
  // relative to the manifest's directory.
  std::map<std::string, std::filesystem::path> features;
  std::map<std::string, std::filesystem::path> labels;
};

/// Dataset manifest:
///
///   {
///     "frame_len_ms": 250,
///     "videos": {
///       "<video_id>": {
///         "partition": "train" | "devel" | "test",
///         "features": {"<track>": "<feature csv>", ...},
///         "labels": {"arousal": "<label csv>", ...}
///       }, ...
///     }
///   }
///
/// Video order is the order of keys in the file.
struct Manifest {
  std::filesystem::path base_dir;
  std::int64_t frame_len_ms = kDefaultFrameLenMs;
  std::vector<ManifestEntry> videos;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  std::vector<const ManifestEntry*> partition(const std::string& name) const;
};

Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& json_text, std::filesystem::path base_dir,
                        std::string_view source = "<manifest>");
std::string manifest_to_json(const Manifest& manifest);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Every referenced file that does not exist, in manifest order.
std::vector<std::filesystem::path> missing_files(const Manifest& manifest);

/// Frame count of a video: the length of its first label file when it has
/// one, otherwise the number of frames needed to cover its feature spans.
std::size_t frame_count(const Manifest& manifest, const ManifestEntry& entry);

/// Parses, aligns and fuses one video's tracks in `track_order`. Labels are
/// loaded for every target in the entry.
FusedSequence load_fused(const Manifest& manifest, const ManifestEntry& entry,
                         const std::vector<std::string>& track_order);

/// load_fused over a partition ("all" selects every video).
std::vector<FusedSequence> load_partition(const Manifest& manifest, const std::string& partition,
                                          const std::vector<std::string>& track_order);

}  // namespace seqfuse

#endif  // SEQFUSE_MANIFEST_HPP_
