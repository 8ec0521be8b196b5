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

#ifndef SEQFUSE_NN_HPP_
#define SEQFUSE_NN_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "seqfuse/matrix.hpp"

namespace seqfuse {

/// y = weight * x + bias, weight is out x in.
struct LinearLayer {
  Matrix weight;
  Vector bias;

  std::size_t in() const noexcept { return weight.cols(); }
  std::size_t out() const noexcept { return weight.rows(); }
  bool operator==(const LinearLayer&) const = default;
};

/// Single LSTM cell. Gate rows are stacked in the order input, forget,
/// cell candidate, output; each block has hidden() rows.
struct LstmCell {
  Matrix input_weights;      // 4h x D
  Matrix recurrent_weights;  // 4h x h
  Vector bias;               // 4h

  std::size_t input_size() const noexcept { return input_weights.cols(); }
  std::size_t hidden() const noexcept { return recurrent_weights.cols(); }
  bool operator==(const LstmCell&) const = default;
};

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };

struct ModelDims {
  std::size_t input = 1;   // fused feature width D
  std::size_t embed = 1;   // projection width e
  std::size_t hidden = 1;  // LSTM units h
  std::size_t head = 1;    // regression head hidden width m

  bool operator==(const ModelDims&) const = default;
};

inline constexpr std::size_t kParameterBlocks = 9;

/// Fused frame -> ReLU projection -> LSTM -> ReLU hidden layer -> scalar.
struct Model {
  LinearLayer projection;   // D -> e
  LstmCell lstm;            // e -> h
  LinearLayer head_hidden;  // h -> m
  LinearLayer head_out;     // m -> 1

  ModelDims dims() const;

  /// Parameter tensors in serialization order: projection W, b; lstm input
  /// W, recurrent W, b; head_hidden W, b; head_out W, b.
  std::array<std::span<double>, kParameterBlocks> blocks();
  std::array<std::span<const double>, kParameterBlocks> blocks() const;

  bool operator==(const Model&) const = default;
};

inline constexpr std::array<std::string_view, kParameterBlocks> kBlockNames = {
    "projection.weight", "projection.bias",    "lstm.input_weights",
    "lstm.recurrent_weights", "lstm.bias",     "head_hidden.weight",
    "head_hidden.bias", "head_out.weight",     "head_out.bias",
};

/// Same layout as Model; each tensor holds d(loss)/d(parameter).
using Gradients = Model;

Model zero_model(const ModelDims& dims);

/// Uniform in +-1/sqrt(fan_in) for every tensor, then the forget-gate bias
/// block is set to 1.0.
Model init_model(std::uint64_t seed, const ModelDims& dims);

/// Throws kInvalidArgument if adjacent layer sizes disagree.
void validate_model(const Model& model);

Vector linear(const LinearLayer& layer, std::span<const double> x);
Vector linear_relu(const LinearLayer& layer, std::span<const double> x);

struct LstmState {
  Vector h;
  Vector c;
};

LstmState lstm_step(const LstmCell& cell, std::span<const double> x,
                    std::span<const double> h_prev, std::span<const double> c_prev);

/// Every intermediate of one forward pass, one row per step. Masks hold
/// the inverted-dropout multipliers (0 or 1/(1-rate)); all ones when
/// dropout is off.
struct ForwardTrace {
  Matrix inputs;          // t x D
  Matrix projected_pre;   // t x e, before ReLU
  Matrix embed_mask;      // t x e
  Matrix embedded;        // t x e, after ReLU and dropout: LSTM input
  Matrix gate_pre;        // t x 4h
  Matrix gates;           // t x 4h, sigmoid / tanh applied
  Matrix cell;            // t x h
  Matrix hidden;          // t x h
  Matrix head_pre;        // t x m, before ReLU
  Matrix head_mask;       // t x m
  Matrix head_act;        // t x m, after ReLU and dropout
  Vector predictions;     // t

  std::size_t steps() const noexcept { return predictions.size(); }
  bool operator==(const ForwardTrace&) const = default;
};

/// Runs the model over a t x D sequence from zero LSTM state. Dropout is
/// applied only when mask_seed is given (after the projection and after the
/// head hidden layer); without a seed no randomness is drawn.
ForwardTrace forward(const Model& model, const Matrix& inputs, double dropout_rate = 0.0,
                     std::optional<std::uint64_t> mask_seed = std::nullopt);

/// Evaluation-mode predictions.
Vector predict(const Model& model, const Matrix& inputs);

/// Exact gradient of mse_loss(trace.predictions, labels) by backpropagation
/// through time, reusing the trace's dropout masks.
Gradients backward(const Model& model, const ForwardTrace& trace,
                   std::span<const double> labels);

}  // namespace seqfuse

#endif  // SEQFUSE_NN_HPP_
