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

#ifndef SEQFUSE_TESTS_ORACLES_HPP_
#define SEQFUSE_TESTS_ORACLES_HPP_

// Reference computations for tests. Each one is written from the defining
// formula and shares no code path with the library function it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "seqfuse/featureio.hpp"
#include "seqfuse/matrix.hpp"
#include "seqfuse/nn.hpp"

namespace seqfuse::oracle {

/// For every frame, scan every token and test millisecond intersection of
/// [start, end) with [j*len, (j+1)*len). Returns t x dim means.
inline Matrix brute_force_align(const TokenTrack& track, std::int64_t frame_len_ms,
                                std::size_t n_frames) {
  // Same summation order as the documented canonical token order.
  std::vector<TokenFeature> tokens = track.tokens;
  std::sort(tokens.begin(), tokens.end(), [](const TokenFeature& a, const TokenFeature& b) {
    if (a.start_ms != b.start_ms) return a.start_ms < b.start_ms;
    if (a.end_ms != b.end_ms) return a.end_ms < b.end_ms;
    return a.values < b.values;
  });
  Matrix out(n_frames, track.dim);
  for (std::size_t j = 0; j < n_frames; ++j) {
    const std::int64_t lo = static_cast<std::int64_t>(j) * frame_len_ms;
    const std::int64_t hi = lo + frame_len_ms;
    std::vector<double> sum(track.dim, 0.0);
    std::size_t count = 0;
    for (const TokenFeature& tok : tokens) {
      const std::int64_t a = std::max(lo, tok.start_ms);
      const std::int64_t b = std::min(hi, tok.end_ms);
      if (a < b) {
        for (std::size_t k = 0; k < track.dim; ++k) sum[k] += tok.values[k];
        ++count;
      }
    }
    for (std::size_t k = 0; k < track.dim; ++k) {
      out(j, k) = count == 0 ? 0.0 : sum[k] / static_cast<double>(count);
    }
  }
  return out;
}

/// Lin's CCC from raw power sums in extended precision:
/// cov = E[xy] - E[x]E[y], var = E[x^2] - E[x]^2.
inline double direct_ccc(std::span<const double> x, std::span<const double> y) {
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const long double n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double a = x[i];
    const long double b = y[i];
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const long double mx = sx / n;
  const long double my = sy / n;
  const long double vx = sxx / n - mx * mx;
  const long double vy = syy / n - my * my;
  const long double cov = sxy / n - mx * my;
  return static_cast<double>(2 * cov / (vx + vy + (mx - my) * (mx - my)));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// LSTM step written one scalar at a time from the gate definitions.
inline void scalar_lstm_step(const LstmCell& cell, std::span<const double> x,
                             std::span<const double> h_prev, std::span<const double> c_prev,
                             std::vector<double>& h_out, std::vector<double>& c_out) {
  const std::size_t h = cell.recurrent_weights.cols();
  h_out.assign(h, 0.0);
  c_out.assign(h, 0.0);
  auto gate_pre = [&](std::size_t block, std::size_t unit) {
    const std::size_t r = block * h + unit;
    double s = cell.bias[r];
    for (std::size_t k = 0; k < x.size(); ++k) s += cell.input_weights(r, k) * x[k];
    for (std::size_t k = 0; k < h; ++k) s += cell.recurrent_weights(r, k) * h_prev[k];
    return s;
  };
  for (std::size_t u = 0; u < h; ++u) {
    const double i = logistic(gate_pre(0, u));
    const double f = logistic(gate_pre(1, u));
    const double g = std::tanh(gate_pre(2, u));
    const double o = logistic(gate_pre(3, u));
    c_out[u] = f * c_prev[u] + i * g;
    h_out[u] = o * std::tanh(c_out[u]);
  }
}

/// Central finite difference of `loss` with respect to every entry of every
/// parameter block of `model`.
inline std::vector<std::vector<double>> finite_difference_gradient(
    Model model, const std::function<double(const Model&)>& loss, double step) {
  std::vector<std::vector<double>> grads;
  auto blocks = model.blocks();
  for (auto& block : blocks) {
    std::vector<double> g(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block[i];
      block[i] = saved + step;
      const double up = loss(model);
      block[i] = saved - step;
      const double down = loss(model);
      block[i] = saved;
      g[i] = (up - down) / (2.0 * step);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace seqfuse::oracle

#endif  // SEQFUSE_TESTS_ORACLES_HPP_
