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

#ifndef SEQFUSE_CHECKPOINT_HPP_
#define SEQFUSE_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "seqfuse/nn.hpp"
#include "seqfuse/config.hpp"

namespace seqfuse {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout (all integers little-endian):
///
///   "SQF1"                 4 bytes, magic + format version
///   header_size            uint64
///   header                 header_size bytes of JSON: format_version,
///                          config, dims, tracks, best_devel_ccc, epoch and
///                          a "blocks" table {name, rows, cols, offset, count}
///   parameters             float64 blocks in Model::blocks() order; offsets
///                          are bytes from the start of this section
struct Checkpoint {
  Model model;
  TrainConfig config;
  std::vector<TrackSpec> tracks;
  double best_devel_ccc = 0.0;
  std::size_t epoch = 0;
  std::uint32_t format_version = kCheckpointVersion;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace seqfuse

#endif  // SEQFUSE_CHECKPOINT_HPP_
