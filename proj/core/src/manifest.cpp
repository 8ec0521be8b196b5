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

#include "seqfuse/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seqfuse/error.hpp"

namespace seqfuse {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path Manifest::resolve(const std::filesystem::path& p) const {
  if (p.is_absolute()) return p;
  return base_dir / p;
}

std::vector<const ManifestEntry*> Manifest::partition(const std::string& name) const {
  std::vector<const ManifestEntry*> out;
  for (const ManifestEntry& entry : videos) {
    if (name == "all" || entry.partition == name) out.push_back(&entry);
  }
  return out;
}

Manifest parse_manifest(const std::string& json_text, std::filesystem::path base_dir,
                        std::string_view source) {
  const std::string src(source);
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kInvalidArgument, src + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("videos") || !doc["videos"].is_object()) {
    throw Error(ErrorKind::kInvalidArgument, src + ": missing object field 'videos'");
  }

  Manifest manifest;
  manifest.base_dir = std::move(base_dir);
  if (doc.contains("frame_len_ms")) {
    if (!doc["frame_len_ms"].is_number_integer() || doc["frame_len_ms"].get<std::int64_t>() < 1) {
      throw Error(ErrorKind::kInvalidArgument, src + ": frame_len_ms must be a positive integer");
    }
    manifest.frame_len_ms = doc["frame_len_ms"].get<std::int64_t>();
  }

  for (const auto& [video_id, body] : doc["videos"].items()) {
    const std::string ctx = src + ": video '" + video_id + "'";
    if (!body.is_object()) throw Error(ErrorKind::kInvalidArgument, ctx + " is not an object");
    ManifestEntry entry;
    entry.video_id = video_id;
    if (!body.contains("partition") || !body["partition"].is_string()) {
      throw Error(ErrorKind::kInvalidArgument, ctx + ": missing field 'partition'");
    }
    entry.partition = body["partition"].get<std::string>();
    if (std::find(std::begin(kPartitionNames), std::end(kPartitionNames), entry.partition) ==
        std::end(kPartitionNames)) {
      throw Error(ErrorKind::kInvalidArgument,
                  ctx + ": partition must be train, devel or test, got '" + entry.partition + "'");
    }
    if (!body.contains("features") || !body["features"].is_object() ||
        body["features"].empty()) {
      throw Error(ErrorKind::kInvalidArgument, ctx + ": missing non-empty object 'features'");
    }
    for (const auto& [name, path] : body["features"].items()) {
      if (!path.is_string()) throw Error(ErrorKind::kInvalidArgument, ctx + ": bad path");
      entry.features.emplace(name, path.get<std::string>());
    }
    if (body.contains("labels")) {
      if (!body["labels"].is_object()) {
        throw Error(ErrorKind::kInvalidArgument, ctx + ": 'labels' must be an object");
      }
      for (const auto& [name, path] : body["labels"].items()) {
        if (!path.is_string()) throw Error(ErrorKind::kInvalidArgument, ctx + ": bad path");
        entry.labels.emplace(name, path.get<std::string>());
      }
    }
    manifest.videos.push_back(std::move(entry));
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), path.parent_path(), path.string());
}

std::string manifest_to_json(const Manifest& manifest) {
  ordered_json doc;
  doc["frame_len_ms"] = manifest.frame_len_ms;
  ordered_json videos = ordered_json::object();
  for (const ManifestEntry& entry : manifest.videos) {
    ordered_json body;
    body["partition"] = entry.partition;
    ordered_json features = ordered_json::object();
    for (const auto& [name, path] : entry.features) features[name] = path.generic_string();
    body["features"] = std::move(features);
    ordered_json labels = ordered_json::object();
    for (const auto& [name, path] : entry.labels) labels[name] = path.generic_string();
    body["labels"] = std::move(labels);
    videos[entry.video_id] = std::move(body);
  }
  doc["videos"] = std::move(videos);
  return doc.dump(2) + "\n";
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out << manifest_to_json(manifest);
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "write failed for " + path.string());
}

std::vector<std::filesystem::path> missing_files(const Manifest& manifest) {
  std::vector<std::filesystem::path> missing;
  for (const ManifestEntry& entry : manifest.videos) {
    for (const auto& group : {&entry.features, &entry.labels}) {
      for (const auto& [name, path] : *group) {
        const auto full = manifest.resolve(path);
        if (!std::filesystem::is_regular_file(full)) missing.push_back(full);
      }
    }
  }
  return missing;
}

std::size_t frame_count(const Manifest& manifest, const ManifestEntry& entry) {
  if (!entry.labels.empty()) {
    return parse_label_csv(manifest.resolve(entry.labels.begin()->second), manifest.frame_len_ms)
        .size();
  }
  std::int64_t end = 0;
  for (const auto& [name, path] : entry.features) {
    for (const TokenFeature& token : parse_feature_csv(manifest.resolve(path)).tokens) {
      end = std::max(end, token.end_ms);
    }
  }
  const std::int64_t frames = (end + manifest.frame_len_ms - 1) / manifest.frame_len_ms;
  return static_cast<std::size_t>(std::max<std::int64_t>(frames, 1));
}

FusedSequence load_fused(const Manifest& manifest, const ManifestEntry& entry,
                         const std::vector<std::string>& track_order) {
  LabelMap labels;
  for (const auto& [target, path] : entry.labels) {
    labels.emplace(target, parse_label_csv(manifest.resolve(path), manifest.frame_len_ms));
  }
  std::size_t n_frames = labels.empty() ? frame_count(manifest, entry)
                                        : labels.begin()->second.size();

  std::vector<FrameTrack> tracks;
  tracks.reserve(track_order.size());
  for (const std::string& name : track_order) {
    const auto it = entry.features.find(name);
    if (it == entry.features.end()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "video '" + entry.video_id + "' has no track '" + name + "'");
    }
    TokenTrack tokens = parse_feature_csv(manifest.resolve(it->second));
    tokens.name = name;
    tracks.push_back(align_tokens_to_frames(tokens, manifest.frame_len_ms, n_frames));
  }
  return fuse(tracks, std::move(labels), entry.video_id);
}

std::vector<FusedSequence> load_partition(const Manifest& manifest, const std::string& partition,
                                          const std::vector<std::string>& track_order) {
  std::vector<FusedSequence> out;
  for (const ManifestEntry* entry : manifest.partition(partition)) {
    out.push_back(load_fused(manifest, *entry, track_order));
  }
  return out;
}

}  // namespace seqfuse
