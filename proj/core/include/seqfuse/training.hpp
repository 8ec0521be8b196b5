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

#ifndef SEQFUSE_TRAINING_HPP_
#define SEQFUSE_TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "seqfuse/checkpoint.hpp"
#include "seqfuse/config.hpp"
#include "seqfuse/featureio.hpp"
#include "seqfuse/nn.hpp"

namespace seqfuse {

/// Mean over steps of squared error.
double mse_loss(std::span<const double> predictions, std::span<const double> labels);

struct Chunk {
  Matrix inputs;
  Vector labels;
};

/// Consecutive non-overlapping windows of at most max_time_step frames,
/// in temporal order.
std::vector<Chunk> chunk(const FusedSequence& sequence, const std::string& target,
                         std::size_t max_time_step);

struct AdamState {
  Model first_moment;
  Model second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const Model& model);
  bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update, in place.
void adam_step(Model& model, const Gradients& grads, AdamState& state, const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double devel_ccc = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;
};

/// Trains one model for config.target. Each epoch shuffles the videos,
/// runs one forward/backward/Adam step per chunk (LSTM state restarts at
/// every chunk), then scores the devel set by concatenated CCC with
/// dropout off. The returned checkpoint holds the best-scoring parameters;
/// epoch 0 is the freshly initialized model. Training stops after
/// `patience` epochs without strict improvement.
TrainResult train(std::span<const FusedSequence> train_set,
                  std::span<const FusedSequence> devel_set, const TrainConfig& config);

void write_history_csv(std::span<const EpochRecord> history, std::ostream& out);
void write_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path);

/// Seed of the dropout masks for one update.
std::uint64_t chunk_mask_seed(std::uint64_t seed, std::size_t epoch, std::size_t chunk_index);

}  // namespace seqfuse

#endif  // SEQFUSE_TRAINING_HPP_
