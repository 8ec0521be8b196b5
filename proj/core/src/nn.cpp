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

#include "seqfuse/nn.hpp"

#include <cmath>
#include <string>

#include "seqfuse/error.hpp"
#include "seqfuse/rng.hpp"

namespace seqfuse {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LinearLayer zero_linear(std::size_t in, std::size_t out) {
  return {Matrix(out, in), Vector(out, 0.0)};
}

void fill_uniform(Rng& rng, std::span<double> values, double bound) {
  for (double& v : values) v = rng.uniform(-bound, bound);
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::kDimMismatch, std::string(what) + ": expected length " +
                                             std::to_string(want) + ", got " +
                                             std::to_string(got));
  }
}

// out = W * x + b, accumulated in column order with the bias added first.
void affine(const Matrix& weight, std::span<const double> bias, std::span<const double> x,
            std::span<double> out) {
  for (std::size_t r = 0; r < weight.rows(); ++r) {
    const auto w = weight.row(r);
    double acc = bias[r];
    for (std::size_t c = 0; c < x.size(); ++c) acc += w[c] * x[c];
    out[r] = acc;
  }
}

void add_matvec(const Matrix& weight, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < weight.rows(); ++r) {
    const auto w = weight.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) acc += w[c] * x[c];
    out[r] += acc;
  }
}

// out += W^T * g
void add_transposed_matvec(const Matrix& weight, std::span<const double> g,
                           std::span<double> out) {
  for (std::size_t r = 0; r < weight.rows(); ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    const auto w = weight.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w[c] * gr;
  }
}

// grad += g x^T
void add_outer(Matrix& grad, std::span<const double> g, std::span<const double> x) {
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    auto row = grad.row(r);
    for (std::size_t c = 0; c < x.size(); ++c) row[c] += gr * x[c];
  }
}

void add_into(std::span<double> acc, std::span<const double> g) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

// Gate pre-activations and activations for one step; shared by lstm_step
// and forward so both produce identical arithmetic.
void lstm_gates(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                std::span<double> pre, std::span<double> act) {
  affine(cell.input_weights, cell.bias, x, pre);
  add_matvec(cell.recurrent_weights, h_prev, pre);
  const std::size_t h = cell.hidden();
  for (std::size_t k = 0; k < 4 * h; ++k) {
    act[k] = (k / h == kCellGate) ? std::tanh(pre[k]) : sigmoid(pre[k]);
  }
}

void lstm_update(std::size_t h, std::span<const double> act, std::span<const double> c_prev,
                 std::span<double> c, std::span<double> h_out) {
  for (std::size_t k = 0; k < h; ++k) {
    const double i = act[kInputGate * h + k];
    const double f = act[kForgetGate * h + k];
    const double g = act[kCellGate * h + k];
    const double o = act[kOutputGate * h + k];
    c[k] = f * c_prev[k] + i * g;
    h_out[k] = o * std::tanh(c[k]);
  }
}

}  // namespace

ModelDims Model::dims() const {
  return {projection.in(), projection.out(), lstm.hidden(), head_hidden.out()};
}

std::array<std::span<double>, kParameterBlocks> Model::blocks() {
  return {projection.weight.values(),   std::span<double>(projection.bias),
          lstm.input_weights.values(),  lstm.recurrent_weights.values(),
          std::span<double>(lstm.bias), head_hidden.weight.values(),
          std::span<double>(head_hidden.bias), head_out.weight.values(),
          std::span<double>(head_out.bias)};
}

std::array<std::span<const double>, kParameterBlocks> Model::blocks() const {
  return {projection.weight.values(),         std::span<const double>(projection.bias),
          lstm.input_weights.values(),        lstm.recurrent_weights.values(),
          std::span<const double>(lstm.bias), head_hidden.weight.values(),
          std::span<const double>(head_hidden.bias), head_out.weight.values(),
          std::span<const double>(head_out.bias)};
}

Model zero_model(const ModelDims& dims) {
  if (dims.input == 0 || dims.embed == 0 || dims.hidden == 0 || dims.head == 0) {
    throw Error(ErrorKind::kInvalidArgument, "model dims must all be >= 1");
  }
  Model model;
  model.projection = zero_linear(dims.input, dims.embed);
  model.lstm.input_weights = Matrix(4 * dims.hidden, dims.embed);
  model.lstm.recurrent_weights = Matrix(4 * dims.hidden, dims.hidden);
  model.lstm.bias = Vector(4 * dims.hidden, 0.0);
  model.head_hidden = zero_linear(dims.hidden, dims.head);
  model.head_out = zero_linear(dims.head, 1);
  return model;
}

Model init_model(std::uint64_t seed, const ModelDims& dims) {
  Model model = zero_model(dims);
  Rng rng(seed);
  auto fan_bound = [](std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };

  fill_uniform(rng, model.projection.weight.values(), fan_bound(dims.input));
  fill_uniform(rng, model.projection.bias, fan_bound(dims.input));
  // LSTM gates see [x; h_prev], so fan-in is e + h.
  const double lstm_bound = fan_bound(dims.embed + dims.hidden);
  fill_uniform(rng, model.lstm.input_weights.values(), lstm_bound);
  fill_uniform(rng, model.lstm.recurrent_weights.values(), lstm_bound);
  fill_uniform(rng, model.lstm.bias, lstm_bound);
  for (std::size_t k = 0; k < dims.hidden; ++k) {
    model.lstm.bias[kForgetGate * dims.hidden + k] = 1.0;
  }
  fill_uniform(rng, model.head_hidden.weight.values(), fan_bound(dims.hidden));
  fill_uniform(rng, model.head_hidden.bias, fan_bound(dims.hidden));
  fill_uniform(rng, model.head_out.weight.values(), fan_bound(dims.head));
  fill_uniform(rng, model.head_out.bias, fan_bound(dims.head));
  return model;
}

void validate_model(const Model& m) {
  const ModelDims d = m.dims();
  const bool ok = m.projection.bias.size() == d.embed && m.lstm.input_weights.cols() == d.embed &&
                  m.lstm.input_weights.rows() == 4 * d.hidden &&
                  m.lstm.recurrent_weights.rows() == 4 * d.hidden &&
                  m.lstm.bias.size() == 4 * d.hidden && m.head_hidden.in() == d.hidden &&
                  m.head_hidden.bias.size() == d.head && m.head_out.in() == d.head &&
                  m.head_out.out() == 1 && m.head_out.bias.size() == 1 && d.input > 0 &&
                  d.embed > 0 && d.hidden > 0 && d.head > 0;
  if (!ok) throw Error(ErrorKind::kInvalidArgument, "model layer sizes are inconsistent");
}

Vector linear(const LinearLayer& layer, std::span<const double> x) {
  require_dim(x.size(), layer.in(), "linear input");
  Vector out(layer.out());
  affine(layer.weight, layer.bias, x, out);
  return out;
}

Vector linear_relu(const LinearLayer& layer, std::span<const double> x) {
  Vector out = linear(layer, x);
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  return out;
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> x,
                    std::span<const double> h_prev, std::span<const double> c_prev) {
  const std::size_t h = cell.hidden();
  require_dim(x.size(), cell.input_size(), "lstm input");
  require_dim(h_prev.size(), h, "lstm h_prev");
  require_dim(c_prev.size(), h, "lstm c_prev");
  Vector pre(4 * h);
  Vector act(4 * h);
  lstm_gates(cell, x, h_prev, pre, act);
  LstmState next{Vector(h), Vector(h)};
  lstm_update(h, act, c_prev, next.c, next.h);
  return next;
}

ForwardTrace forward(const Model& model, const Matrix& inputs, double dropout_rate,
                     std::optional<std::uint64_t> mask_seed) {
  const ModelDims d = model.dims();
  require_dim(inputs.cols(), d.input, "forward input width");
  if (inputs.rows() == 0) throw Error(ErrorKind::kEmptySequence, "forward on empty sequence");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "dropout_rate must be in [0, 1)");
  }
  const std::size_t t = inputs.rows();

  ForwardTrace tr;
  tr.inputs = inputs;
  tr.projected_pre = Matrix(t, d.embed);
  tr.embed_mask = Matrix(t, d.embed, 1.0);
  tr.embedded = Matrix(t, d.embed);
  tr.gate_pre = Matrix(t, 4 * d.hidden);
  tr.gates = Matrix(t, 4 * d.hidden);
  tr.cell = Matrix(t, d.hidden);
  tr.hidden = Matrix(t, d.hidden);
  tr.head_pre = Matrix(t, d.head);
  tr.head_mask = Matrix(t, d.head, 1.0);
  tr.head_act = Matrix(t, d.head);
  tr.predictions = Vector(t);

  std::optional<Rng> mask_rng;
  if (mask_seed) mask_rng.emplace(*mask_seed);
  const double keep_scale = 1.0 / (1.0 - dropout_rate);
  auto draw_mask = [&](std::span<double> mask) {
    for (double& m : mask) m = mask_rng->uniform() >= dropout_rate ? keep_scale : 0.0;
  };

  const Vector zeros(d.hidden, 0.0);
  for (std::size_t j = 0; j < t; ++j) {
    auto pre = tr.projected_pre.row(j);
    affine(model.projection.weight, model.projection.bias, inputs.row(j), pre);
    auto emask = tr.embed_mask.row(j);
    if (mask_rng) draw_mask(emask);
    auto emb = tr.embedded.row(j);
    for (std::size_t k = 0; k < d.embed; ++k) emb[k] = (pre[k] > 0.0 ? pre[k] : 0.0) * emask[k];

    const std::span<const double> h_prev = j == 0 ? std::span<const double>(zeros)
                                                  : std::span<const double>(tr.hidden.row(j - 1));
    const std::span<const double> c_prev = j == 0 ? std::span<const double>(zeros)
                                                  : std::span<const double>(tr.cell.row(j - 1));
    lstm_gates(model.lstm, emb, h_prev, tr.gate_pre.row(j), tr.gates.row(j));
    lstm_update(d.hidden, tr.gates.row(j), c_prev, tr.cell.row(j), tr.hidden.row(j));

    auto hpre = tr.head_pre.row(j);
    affine(model.head_hidden.weight, model.head_hidden.bias, tr.hidden.row(j), hpre);
    auto hmask = tr.head_mask.row(j);
    if (mask_rng) draw_mask(hmask);
    auto hact = tr.head_act.row(j);
    for (std::size_t k = 0; k < d.head; ++k) hact[k] = (hpre[k] > 0.0 ? hpre[k] : 0.0) * hmask[k];

    double y = 0.0;
    affine(model.head_out.weight, model.head_out.bias, hact, std::span<double>(&y, 1));
    tr.predictions[j] = y;
  }
  return tr;
}

Vector predict(const Model& model, const Matrix& inputs) {
  return forward(model, inputs).predictions;
}

Gradients backward(const Model& model, const ForwardTrace& tr, std::span<const double> labels) {
  const ModelDims d = model.dims();
  const std::size_t t = tr.steps();
  const bool shapes_ok =
      t > 0 && tr.inputs.rows() == t && tr.inputs.cols() == d.input &&
      tr.projected_pre.rows() == t && tr.projected_pre.cols() == d.embed &&
      tr.embed_mask.rows() == t && tr.embed_mask.cols() == d.embed && tr.embedded.rows() == t &&
      tr.embedded.cols() == d.embed && tr.gates.rows() == t && tr.gates.cols() == 4 * d.hidden &&
      tr.cell.rows() == t && tr.cell.cols() == d.hidden && tr.hidden.rows() == t &&
      tr.hidden.cols() == d.hidden && tr.head_pre.rows() == t && tr.head_pre.cols() == d.head &&
      tr.head_mask.rows() == t && tr.head_mask.cols() == d.head && tr.head_act.rows() == t &&
      tr.head_act.cols() == d.head;
  if (!shapes_ok) throw Error(ErrorKind::kTraceMismatch, "trace does not match model dims");
  if (labels.size() != t) {
    throw Error(ErrorKind::kTraceMismatch, "labels length " + std::to_string(labels.size()) +
                                               " differs from trace length " + std::to_string(t));
  }

  Gradients grad = zero_model(d);
  const std::size_t h = d.hidden;
  // dL/dh_j contributed by the head at step j.
  Matrix dh_head(t, h);
  Vector dhead(d.head);
  const double scale = 2.0 / static_cast<double>(t);

  for (std::size_t j = 0; j < t; ++j) {
    const double dy = scale * (tr.predictions[j] - labels[j]);
    grad.head_out.bias[0] += dy;
    const auto hact = tr.head_act.row(j);
    add_outer(grad.head_out.weight, std::span<const double>(&dy, 1), hact);

    const auto hpre = tr.head_pre.row(j);
    const auto hmask = tr.head_mask.row(j);
    for (std::size_t k = 0; k < d.head; ++k) {
      dhead[k] = hpre[k] > 0.0 ? dy * model.head_out.weight(0, k) * hmask[k] : 0.0;
    }
    add_outer(grad.head_hidden.weight, dhead, tr.hidden.row(j));
    add_into(grad.head_hidden.bias, dhead);
    add_transposed_matvec(model.head_hidden.weight, dhead, dh_head.row(j));
  }

  Vector dh_next(h, 0.0);
  Vector dc_next(h, 0.0);
  Vector dgate(4 * h);
  Vector dx(d.embed);
  Vector dproj(d.embed);
  const Vector zeros(h, 0.0);

  for (std::size_t jj = t; jj-- > 0;) {
    const auto act = tr.gates.row(jj);
    const auto c = tr.cell.row(jj);
    const std::span<const double> c_prev = jj == 0 ? std::span<const double>(zeros)
                                                   : std::span<const double>(tr.cell.row(jj - 1));
    const std::span<const double> h_prev = jj == 0 ? std::span<const double>(zeros)
                                                   : std::span<const double>(tr.hidden.row(jj - 1));
    const auto dh_j = dh_head.row(jj);
    for (std::size_t k = 0; k < h; ++k) {
      const double i = act[kInputGate * h + k];
      const double f = act[kForgetGate * h + k];
      const double g = act[kCellGate * h + k];
      const double o = act[kOutputGate * h + k];
      const double dh = dh_j[k] + dh_next[k];
      const double tanh_c = std::tanh(c[k]);
      const double dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_next[k];
      dgate[kInputGate * h + k] = dc * g * i * (1.0 - i);
      dgate[kForgetGate * h + k] = dc * c_prev[k] * f * (1.0 - f);
      dgate[kCellGate * h + k] = dc * i * (1.0 - g * g);
      dgate[kOutputGate * h + k] = dh * tanh_c * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    const auto emb = tr.embedded.row(jj);
    add_outer(grad.lstm.input_weights, dgate, emb);
    add_outer(grad.lstm.recurrent_weights, dgate, h_prev);
    add_into(grad.lstm.bias, dgate);

    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    add_transposed_matvec(model.lstm.recurrent_weights, dgate, dh_next);
    std::fill(dx.begin(), dx.end(), 0.0);
    add_transposed_matvec(model.lstm.input_weights, dgate, dx);

    const auto ppre = tr.projected_pre.row(jj);
    const auto emask = tr.embed_mask.row(jj);
    for (std::size_t k = 0; k < d.embed; ++k) {
      dproj[k] = ppre[k] > 0.0 ? dx[k] * emask[k] : 0.0;
    }
    add_outer(grad.projection.weight, dproj, tr.inputs.row(jj));
    add_into(grad.projection.bias, dproj);
  }
  return grad;
}

}  // namespace seqfuse
