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

#include "seqfuse/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seqfuse/error.hpp"

namespace seqfuse {

namespace {

using json = nlohmann::json;

constexpr char kMagicPrefix[3] = {'S', 'Q', 'F'};
constexpr char kMagic[4] = {'S', 'Q', 'F', '1'};
constexpr std::size_t kPreambleSize = 4 + 8;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

struct BlockShape {
  std::size_t rows;
  std::size_t cols;
};

std::array<BlockShape, kParameterBlocks> block_shapes(const ModelDims& d) {
  return {{{d.embed, d.input},
           {d.embed, 1},
           {4 * d.hidden, d.embed},
           {4 * d.hidden, d.hidden},
           {4 * d.hidden, 1},
           {d.head, d.hidden},
           {d.head, 1},
           {1, d.head},
           {1, 1}}};
}

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorKind::kCorruptCheckpoint, what);
}

std::size_t get_count(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number_unsigned()) {
    corrupt(std::string("header field '") + key + "' missing or not a count");
  }
  return obj.at(key).get<std::size_t>();
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  validate_model(ckpt.model);
  const ModelDims dims = ckpt.model.dims();

  json header;
  header["format_version"] = kCheckpointVersion;
  header["config"] = json::parse(train_config_to_json(ckpt.config));
  header["dims"] = {{"input", dims.input},
                    {"embed", dims.embed},
                    {"hidden", dims.hidden},
                    {"head", dims.head}};
  header["tracks"] = json::array();
  for (const TrackSpec& t : ckpt.tracks) header["tracks"].push_back({{"name", t.name}, {"dim", t.dim}});
  header["best_devel_ccc"] = ckpt.best_devel_ccc;
  header["epoch"] = ckpt.epoch;
  header["blocks"] = json::array();
  const auto shapes = block_shapes(dims);
  const auto blocks = ckpt.model.blocks();
  std::size_t offset = 0;
  for (std::size_t b = 0; b < kParameterBlocks; ++b) {
    header["blocks"].push_back({{"name", kBlockNames[b]},
                                {"rows", shapes[b].rows},
                                {"cols", shapes[b].cols},
                                {"offset", offset},
                                {"count", blocks[b].size()}});
    offset += blocks[b].size() * sizeof(double);
  }
  const std::string header_text = header.dump();

  std::string out;
  out.reserve(kPreambleSize + header_text.size() + offset);
  out.append(kMagic, sizeof(kMagic));
  put_u64(out, header_text.size());
  out += header_text;
  for (const auto& block : blocks) {
    for (double v : block) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < 4) corrupt("file shorter than the magic bytes");
  if (std::memcmp(bytes.data(), kMagicPrefix, sizeof(kMagicPrefix)) != 0) {
    corrupt("not a checkpoint (bad magic)");
  }
  if (bytes[3] != kMagic[3]) {
    throw Error(ErrorKind::kVersionMismatch,
                std::string("checkpoint format 'SQF") + bytes[3] + "' is not supported (expected SQF1)");
  }
  if (bytes.size() < kPreambleSize) corrupt("truncated preamble");
  const std::uint64_t header_size = get_u64(bytes, 4);
  if (header_size > bytes.size() - kPreambleSize) corrupt("truncated header");

  json header;
  try {
    header = json::parse(bytes.substr(kPreambleSize, header_size));
  } catch (const json::parse_error& e) {
    corrupt(std::string("header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) corrupt("header is not a JSON object");
  if (get_count(header, "format_version") != kCheckpointVersion) {
    throw Error(ErrorKind::kVersionMismatch,
                "checkpoint format_version " + header.at("format_version").dump() +
                    " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ckpt;
  try {
    ckpt.config = train_config_from_json(header.at("config").dump());
  } catch (const Error& e) {
    corrupt(std::string("bad config in header: ") + e.what());
  } catch (const json::exception& e) {
    corrupt(std::string("bad config in header: ") + e.what());
  }
  const json& jd = header.contains("dims") ? header.at("dims") : json();
  const ModelDims dims{get_count(jd, "input"), get_count(jd, "embed"), get_count(jd, "hidden"),
                       get_count(jd, "head")};
  if (dims.input == 0 || dims.embed == 0 || dims.hidden == 0 || dims.head == 0) {
    corrupt("zero model dimension");
  }
  if (dims.embed != ckpt.config.embed_dim || dims.hidden != ckpt.config.hidden_units ||
      dims.head != ckpt.config.head_hidden) {
    corrupt("dims disagree with config");
  }
  if (!header.contains("tracks") || !header.at("tracks").is_array()) corrupt("missing tracks");
  std::size_t track_width = 0;
  for (const json& t : header.at("tracks")) {
    if (!t.is_object() || !t.contains("name") || !t.at("name").is_string()) {
      corrupt("bad track entry");
    }
    ckpt.tracks.push_back({t.at("name").get<std::string>(), get_count(t, "dim")});
    track_width += ckpt.tracks.back().dim;
  }
  if (!ckpt.tracks.empty() && track_width != dims.input) corrupt("track dims do not sum to input");
  if (!header.contains("best_devel_ccc") || !header.at("best_devel_ccc").is_number()) {
    corrupt("missing best_devel_ccc");
  }
  ckpt.best_devel_ccc = header.at("best_devel_ccc").get<double>();
  ckpt.epoch = get_count(header, "epoch");

  ckpt.model = zero_model(dims);
  auto blocks = ckpt.model.blocks();
  const auto shapes = block_shapes(dims);
  if (!header.contains("blocks") || !header.at("blocks").is_array() ||
      header.at("blocks").size() != kParameterBlocks) {
    corrupt("block table must list exactly 9 blocks");
  }
  const std::size_t data_start = kPreambleSize + header_size;
  const std::string_view data = bytes.substr(data_start);
  std::size_t expected_offset = 0;
  for (std::size_t b = 0; b < kParameterBlocks; ++b) {
    const json& entry = header.at("blocks")[b];
    if (!entry.is_object() || !entry.contains("name") || entry.at("name") != kBlockNames[b]) {
      corrupt("block " + std::to_string(b) + " is not " + std::string(kBlockNames[b]));
    }
    if (get_count(entry, "rows") != shapes[b].rows || get_count(entry, "cols") != shapes[b].cols ||
        get_count(entry, "count") != blocks[b].size()) {
      corrupt("block " + std::string(kBlockNames[b]) + " has the wrong shape");
    }
    if (get_count(entry, "offset") != expected_offset) {
      corrupt("block " + std::string(kBlockNames[b]) + " has the wrong offset");
    }
    expected_offset += blocks[b].size() * sizeof(double);
  }
  if (data.size() != expected_offset) {
    corrupt("parameter section is " + std::to_string(data.size()) + " bytes, expected " +
            std::to_string(expected_offset));
  }
  std::size_t pos = 0;
  for (auto& block : blocks) {
    for (double& v : block) {
      v = std::bit_cast<double>(get_u64(data, pos));
      pos += sizeof(double);
    }
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIoFailure, "read failed for " + path.string());
  return deserialize_checkpoint(buffer.str());
}

}  // namespace seqfuse
