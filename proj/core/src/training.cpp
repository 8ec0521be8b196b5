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

#include "seqfuse/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "seqfuse/error.hpp"
#include "seqfuse/metrics.hpp"
#include "seqfuse/rng.hpp"

namespace seqfuse {

namespace {

// Seed streams derived from TrainConfig::seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kMaskStream = 2;

void check_dataset(std::span<const FusedSequence> set, const char* name,
                   const std::string& target) {
  if (set.empty()) throw Error(ErrorKind::kEmptyDataset, std::string(name) + " set is empty");
  for (const FusedSequence& seq : set) {
    if (!seq.labels.contains(target)) {
      throw Error(ErrorKind::kTargetMissing, std::string(name) + " video '" + seq.video_id +
                                                 "' has no '" + target + "' labels");
    }
    if (seq.n_frames() == 0) {
      throw Error(ErrorKind::kEmptySequence, "video '" + seq.video_id + "' has no frames");
    }
  }
}

double devel_score(const Model& model, std::span<const FusedSequence> devel,
                   const std::string& target) {
  try {
    return evaluate_model(model, devel, target).concatenated_ccc;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateInput) throw;
    return 0.0;
  }
}

}  // namespace

double mse_loss(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "mse_loss lengths " + std::to_string(predictions.size()) + " and " +
                    std::to_string(labels.size()));
  }
  if (labels.empty()) throw Error(ErrorKind::kEmptySequence, "mse_loss on empty sequence");
  double sum = 0.0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const double diff = labels[j] - predictions[j];
    sum += diff * diff;
  }
  return sum / static_cast<double>(labels.size());
}

std::vector<Chunk> chunk(const FusedSequence& sequence, const std::string& target,
                         std::size_t max_time_step) {
  if (max_time_step < 1) throw Error(ErrorKind::kInvalidArgument, "max_time_step must be >= 1");
  const std::size_t t = sequence.n_frames();
  if (t == 0) throw Error(ErrorKind::kEmptySequence, "cannot chunk an empty sequence");
  const auto it = sequence.labels.find(target);
  if (it == sequence.labels.end()) {
    throw Error(ErrorKind::kTargetMissing,
                "video '" + sequence.video_id + "' has no '" + target + "' labels");
  }
  const Vector& labels = it->second;
  if (labels.size() != t) {
    throw Error(ErrorKind::kLengthMismatch, "labels and features differ in length");
  }

  std::vector<Chunk> chunks;
  const std::size_t width = sequence.data.cols();
  for (std::size_t begin = 0; begin < t; begin += max_time_step) {
    const std::size_t len = std::min(max_time_step, t - begin);
    Chunk c{Matrix(len, width), Vector(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                                       labels.begin() + static_cast<std::ptrdiff_t>(begin + len))};
    for (std::size_t j = 0; j < len; ++j) {
      const auto src = sequence.data.row(begin + j);
      std::copy(src.begin(), src.end(), c.inputs.row(j).begin());
    }
    chunks.push_back(std::move(c));
  }
  return chunks;
}

AdamState AdamState::zeros_like(const Model& model) {
  AdamState state;
  state.first_moment = zero_model(model.dims());
  state.second_moment = zero_model(model.dims());
  return state;
}

void adam_step(Model& model, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  const ModelDims dims = model.dims();
  if (grads.dims() != dims || state.first_moment.dims() != dims ||
      state.second_moment.dims() != dims) {
    throw Error(ErrorKind::kShapeMismatch, "adam_step: model, gradient and state shapes differ");
  }
  auto params = model.blocks();
  const auto g = grads.blocks();
  auto m = state.first_moment.blocks();
  auto v = state.second_moment.blocks();
  for (std::size_t b = 0; b < kParameterBlocks; ++b) {
    if (g[b].size() != params[b].size() || m[b].size() != params[b].size() ||
        v[b].size() != params[b].size()) {
      throw Error(ErrorKind::kShapeMismatch, "adam_step: block sizes differ");
    }
  }

  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double step = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(b1, step);
  const double correction2 = 1.0 - std::pow(b2, step);
  for (std::size_t b = 0; b < kParameterBlocks; ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double gi = g[b][i];
      m[b][i] = b1 * m[b][i] + (1.0 - b1) * gi;
      v[b][i] = b2 * v[b][i] + (1.0 - b2) * gi * gi;
      const double m_hat = m[b][i] / correction1;
      const double v_hat = v[b][i] / correction2;
      params[b][i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_eps);
    }
  }
}

std::uint64_t chunk_mask_seed(std::uint64_t seed, std::size_t epoch, std::size_t chunk_index) {
  return derive_seed(derive_seed(derive_seed(seed, kMaskStream), epoch), chunk_index);
}

TrainResult train(std::span<const FusedSequence> train_set,
                  std::span<const FusedSequence> devel_set, const TrainConfig& config) {
  config.validate();
  check_dataset(train_set, "train", config.target);
  check_dataset(devel_set, "devel", config.target);
  const FusedSequence& first = train_set.front();
  for (const auto& set : {train_set, devel_set}) {
    for (const FusedSequence& seq : set) {
      if (seq.data.cols() != first.data.cols() || seq.track_dims != first.track_dims ||
          seq.track_names != first.track_names) {
        throw Error(ErrorKind::kDimMismatch, "video '" + seq.video_id +
                                                 "' tracks differ from video '" + first.video_id +
                                                 "'");
      }
    }
  }

  const ModelDims dims{first.data.cols(), config.embed_dim, config.hidden_units,
                       config.head_hidden};
  Model model = init_model(derive_seed(config.seed, kInitStream), dims);
  AdamState adam = AdamState::zeros_like(model);

  std::vector<std::vector<Chunk>> chunks;
  chunks.reserve(train_set.size());
  for (const FusedSequence& seq : train_set) {
    chunks.push_back(
        chunk(seq, config.target, config.chunking ? config.max_time_step : seq.n_frames()));
  }

  TrainResult result;
  Checkpoint& best = result.checkpoint;
  best.config = config;
  for (std::size_t i = 0; i < first.track_names.size(); ++i) {
    best.tracks.push_back({first.track_names[i], first.track_dims[i]});
  }
  best.model = model;
  best.best_devel_ccc = devel_score(model, devel_set, config.target);
  best.epoch = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
  std::size_t stale_epochs = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    std::size_t chunk_index = 0;
    double loss_sum = 0.0;
    for (std::size_t video : order) {
      for (const Chunk& c : chunks[video]) {
        const ForwardTrace trace = forward(model, c.inputs, config.dropout_rate,
                                           chunk_mask_seed(config.seed, epoch, chunk_index));
        loss_sum += mse_loss(trace.predictions, c.labels);
        const Gradients grads = backward(model, trace, c.labels);
        adam_step(model, grads, adam, config);
        ++chunk_index;
      }
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(chunk_index);
    record.devel_ccc = devel_score(model, devel_set, config.target);
    result.history.push_back(record);

    if (record.devel_ccc > best.best_devel_ccc) {
      best.model = model;
      best.best_devel_ccc = record.devel_ccc;
      best.epoch = epoch;
      stale_epochs = 0;
    } else if (++stale_epochs >= config.patience) {
      break;
    }
  }
  return result;
}

void write_history_csv(std::span<const EpochRecord> history, std::ostream& out) {
  out << "epoch,train_loss,devel_ccc\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.devel_ccc)
        << '\n';
  }
}

void write_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  write_history_csv(history, out);
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "write failed for " + path.string());
}

}  // namespace seqfuse
