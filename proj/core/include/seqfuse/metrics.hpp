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

#ifndef SEQFUSE_METRICS_HPP_
#define SEQFUSE_METRICS_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "seqfuse/checkpoint.hpp"
#include "seqfuse/featureio.hpp"
#include "seqfuse/nn.hpp"

namespace seqfuse {

/// Lin's concordance correlation coefficient with population moments:
///
///   2 cov(x, y) / (var(x) + var(y) + (mean(x) - mean(y))^2)
///
/// Throws kDegenerateInput when the denominator is below 1e-12 (both inputs
/// constant and equal).
double ccc(std::span<const double> x, std::span<const double> y);

struct CccReport {
  std::string target;
  double concatenated_ccc = 0.0;
  std::map<std::string, double> per_video;
  // Videos whose own CCC is undefined. They are absent from per_video but
  // still count toward concatenated_ccc.
  std::vector<std::string> degenerate_videos;
  std::size_t n_frames_total = 0;
};

/// Scores externally supplied predictions (one vector per video, same
/// order as dataset). Concatenation follows dataset order.
CccReport evaluate_predictions(std::span<const Vector> predictions,
                               std::span<const FusedSequence> dataset, const std::string& target);

CccReport evaluate_model(const Model& model, std::span<const FusedSequence> dataset,
                         const std::string& target);

/// evaluate_model after checking the dataset's tracks against the
/// checkpoint's recorded track names and dims.
CccReport evaluate(const Checkpoint& ckpt, std::span<const FusedSequence> dataset,
                   const std::string& target);

void check_tracks(const Checkpoint& ckpt, std::span<const FusedSequence> dataset);

std::string report_to_json(const CccReport& report);
std::string report_summary(const CccReport& report);

}  // namespace seqfuse

#endif  // SEQFUSE_METRICS_HPP_
