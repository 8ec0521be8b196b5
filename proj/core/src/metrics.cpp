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

#include "seqfuse/metrics.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "seqfuse/error.hpp"

namespace seqfuse {

namespace {

constexpr double kDegenerateDenominator = 1e-12;

double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

void require_target(const FusedSequence& seq, const std::string& target) {
  if (!seq.labels.contains(target)) {
    throw Error(ErrorKind::kTargetMissing,
                "video '" + seq.video_id + "' has no '" + target + "' labels");
  }
}

}  // namespace

double ccc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch, "ccc inputs have lengths " + std::to_string(x.size()) +
                                                " and " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorKind::kInvalidArgument, "ccc needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double gap = mx - my;
  const double denominator = sxx / n + syy / n + gap * gap;
  if (denominator < kDegenerateDenominator) {
    throw Error(ErrorKind::kDegenerateInput, "ccc of two equal constant sequences");
  }
  return 2.0 * (sxy / n) / denominator;
}

CccReport evaluate_predictions(std::span<const Vector> predictions,
                               std::span<const FusedSequence> dataset,
                               const std::string& target) {
  if (dataset.empty()) throw Error(ErrorKind::kEmptyDataset, "evaluation set is empty");
  if (predictions.size() != dataset.size()) {
    throw Error(ErrorKind::kLengthMismatch, "one prediction vector per video is required");
  }
  CccReport report;
  report.target = target;
  Vector all_pred;
  Vector all_true;
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    const FusedSequence& seq = dataset[v];
    require_target(seq, target);
    const Vector& labels = seq.labels.at(target);
    const Vector& pred = predictions[v];
    if (pred.size() != labels.size()) {
      throw Error(ErrorKind::kLengthMismatch,
                  "video '" + seq.video_id + "': prediction and label lengths differ");
    }
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
    all_true.insert(all_true.end(), labels.begin(), labels.end());
    try {
      report.per_video[seq.video_id] = ccc(pred, labels);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateInput && e.kind() != ErrorKind::kInvalidArgument) {
        throw;
      }
      report.degenerate_videos.push_back(seq.video_id);
    }
  }
  report.n_frames_total = all_true.size();
  report.concatenated_ccc = ccc(all_pred, all_true);
  return report;
}

CccReport evaluate_model(const Model& model, std::span<const FusedSequence> dataset,
                         const std::string& target) {
  if (dataset.empty()) throw Error(ErrorKind::kEmptyDataset, "evaluation set is empty");
  std::vector<Vector> predictions;
  predictions.reserve(dataset.size());
  for (const FusedSequence& seq : dataset) {
    require_target(seq, target);
    if (seq.data.cols() != model.dims().input) {
      throw Error(ErrorKind::kDimMismatch, "video '" + seq.video_id + "' has width " +
                                               std::to_string(seq.data.cols()) + ", model expects " +
                                               std::to_string(model.dims().input));
    }
    predictions.push_back(predict(model, seq.data));
  }
  return evaluate_predictions(predictions, dataset, target);
}

void check_tracks(const Checkpoint& ckpt, std::span<const FusedSequence> dataset) {
  for (const FusedSequence& seq : dataset) {
    bool match = seq.track_names.size() == ckpt.tracks.size() &&
                 seq.track_dims.size() == ckpt.tracks.size();
    for (std::size_t i = 0; match && i < ckpt.tracks.size(); ++i) {
      match = seq.track_names[i] == ckpt.tracks[i].name && seq.track_dims[i] == ckpt.tracks[i].dim;
    }
    if (!match) {
      std::string want;
      for (const TrackSpec& t : ckpt.tracks) {
        want += (want.empty() ? "" : ",") + t.name + ":" + std::to_string(t.dim);
      }
      std::string got;
      for (std::size_t i = 0; i < seq.track_names.size(); ++i) {
        got += (got.empty() ? "" : ",") + seq.track_names[i] + ":" +
               std::to_string(i < seq.track_dims.size() ? seq.track_dims[i] : 0);
      }
      throw Error(ErrorKind::kDimMismatch, "video '" + seq.video_id + "' tracks [" + got +
                                               "] do not match checkpoint [" + want + "]");
    }
  }
}

CccReport evaluate(const Checkpoint& ckpt, std::span<const FusedSequence> dataset,
                   const std::string& target) {
  if (dataset.empty()) throw Error(ErrorKind::kEmptyDataset, "evaluation set is empty");
  check_tracks(ckpt, dataset);
  return evaluate_model(ckpt.model, dataset, target);
}

std::string report_to_json(const CccReport& report) {
  nlohmann::json doc;
  doc["target"] = report.target;
  doc["concatenated_ccc"] = report.concatenated_ccc;
  doc["per_video"] = nlohmann::json::object();
  for (const auto& [id, value] : report.per_video) doc["per_video"][id] = value;
  doc["degenerate_videos"] = report.degenerate_videos;
  doc["n_frames_total"] = report.n_frames_total;
  return doc.dump(2) + "\n";
}

std::string report_summary(const CccReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s: concatenated CCC %.4f over %zu frames, %zu videos",
                report.target.c_str(), report.concatenated_ccc, report.n_frames_total,
                report.per_video.size() + report.degenerate_videos.size());
  std::string line = buf;
  if (!report.degenerate_videos.empty()) {
    line += " (" + std::to_string(report.degenerate_videos.size()) + " without per-video CCC)";
  }
  return line;
}

}  // namespace seqfuse
