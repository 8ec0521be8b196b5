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

#ifndef SEQFUSE_CONFIG_HPP_
#define SEQFUSE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seqfuse {

struct TrainConfig {
  std::string target;  // "arousal" or "valence"
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double dropout_rate = 0.5;
  std::size_t max_time_step = 100;
  // When false every video is one update regardless of length.
  bool chunking = true;
  std::size_t embed_dim = 64;
  std::size_t hidden_units = 64;
  std::size_t head_hidden = 32;
  std::size_t epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> track_order;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// JSON object with every field. Parsing requires "target"; other fields
/// fall back to the defaults above. Unknown keys are rejected.
std::string train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(std::string_view json_text);

struct TrackSpec {
  std::string name;
  std::size_t dim = 0;

  bool operator==(const TrackSpec&) const = default;
};

}  // namespace seqfuse

#endif  // SEQFUSE_CONFIG_HPP_
