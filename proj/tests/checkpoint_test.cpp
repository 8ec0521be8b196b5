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

#include <cstring>

#include <gtest/gtest.h>

#include "seqfuse/checkpoint.hpp"
#include "seqfuse/error.hpp"
#include "seqfuse/rng.hpp"
#include "test_util.hpp"

namespace seqfuse {
namespace {

Checkpoint random_checkpoint(std::uint64_t seed) {
  Rng rng(seed);
  Checkpoint ckpt;
  ckpt.config.target = seed % 2 ? "arousal" : "valence";
  ckpt.config.embed_dim = 1 + rng.below(6);
  ckpt.config.hidden_units = 1 + rng.below(6);
  ckpt.config.head_hidden = 1 + rng.below(6);
  ckpt.config.learning_rate = rng.uniform(1e-5, 1e-2);
  ckpt.config.seed = rng.next_u64();
  const std::size_t d1 = 1 + rng.below(4);
  const std::size_t d2 = 1 + rng.below(4);
  ckpt.tracks = {{"lld", d1}, {"bert_cover", d2}};
  ckpt.config.track_order = {"lld", "bert_cover"};
  ckpt.model = init_model(seed, {d1 + d2, ckpt.config.embed_dim, ckpt.config.hidden_units,
                                 ckpt.config.head_hidden});
  // Exercise the full bit range, including subnormals and negative zero.
  for (auto block : ckpt.model.blocks()) {
    for (double& v : block) {
      const auto pick = rng.below(10);
      if (pick == 0) v = -0.0;
      else if (pick == 1) v = 4.9e-324 * static_cast<double>(1 + rng.below(100));
      else if (pick == 2) v = rng.normal() * 1e300;
    }
  }
  ckpt.best_devel_ccc = rng.uniform(-1.0, 1.0);
  ckpt.epoch = rng.below(300);
  return ckpt;
}

ErrorKind load_error(const std::string& bytes) {
  try {
    deserialize_checkpoint(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "checkpoint unexpectedly loaded";
  return ErrorKind::kInvalidArgument;
}

TEST(Checkpoint, LosslessRoundTripForRandomModels) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Checkpoint ckpt = random_checkpoint(seed);
    const Checkpoint back = deserialize_checkpoint(serialize_checkpoint(ckpt));
    EXPECT_TRUE(testing::bitwise_equal(back.model, ckpt.model)) << seed;
    EXPECT_EQ(back.config, ckpt.config);
    EXPECT_EQ(back.tracks, ckpt.tracks);
    EXPECT_EQ(back.best_devel_ccc, ckpt.best_devel_ccc);
    EXPECT_EQ(back.epoch, ckpt.epoch);
    EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(ckpt));
  }
}

TEST(Checkpoint, FileRoundTrip) {
  testing::TempDir dir;
  const Checkpoint ckpt = random_checkpoint(5);
  save_checkpoint(ckpt, dir / "m.sqf");
  EXPECT_TRUE(testing::bitwise_equal(load_checkpoint(dir / "m.sqf").model, ckpt.model));
  EXPECT_THROW(load_checkpoint(dir / "missing.sqf"), Error);
}

TEST(Checkpoint, DocumentedLayout) {
  const Checkpoint ckpt = random_checkpoint(9);
  const std::string bytes = serialize_checkpoint(ckpt);
  ASSERT_EQ(bytes.substr(0, 4), "SQF1");
  std::uint64_t header_size = 0;
  for (int i = 0; i < 8; ++i) {
    header_size |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[4 + i])) << (8 * i);
  }
  EXPECT_EQ(bytes[12], '{');
  EXPECT_EQ(bytes[12 + header_size - 1], '}');
  // Parameters follow the header as little-endian float64 in block order;
  // the last value is head_out.bias.
  std::size_t total = 0;
  for (const auto& block : ckpt.model.blocks()) total += block.size();
  ASSERT_EQ(bytes.size(), 12 + header_size + total * 8);
  auto read_le = [&](std::size_t pos) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) {
      u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    }
    double d;
    std::memcpy(&d, &u, 8);
    return d;
  };
  const double first = read_le(12 + header_size);
  const double last = read_le(bytes.size() - 8);
  EXPECT_EQ(std::memcmp(&first, &ckpt.model.projection.weight.values()[0], 8), 0);
  EXPECT_EQ(std::memcmp(&last, &ckpt.model.head_out.bias[0], 8), 0);
}

TEST(Checkpoint, TruncatedFilesAreCorrupt) {
  const std::string bytes = serialize_checkpoint(random_checkpoint(3));
  for (std::size_t len : {std::size_t{0}, std::size_t{2}, std::size_t{8}, std::size_t{40},
                          bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_EQ(load_error(bytes.substr(0, len)), ErrorKind::kCorruptCheckpoint) << len;
  }
  EXPECT_EQ(load_error(bytes + "x"), ErrorKind::kCorruptCheckpoint);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(load_error(bad_magic), ErrorKind::kCorruptCheckpoint);
}

TEST(Checkpoint, ForeignVersionTagsAreRejected) {
  std::string bytes = serialize_checkpoint(random_checkpoint(4));
  std::string v2 = bytes;
  v2[3] = '2';
  EXPECT_EQ(load_error(v2), ErrorKind::kVersionMismatch);

  const std::string key = "\"format_version\":1";
  const auto pos = bytes.find(key);
  ASSERT_NE(pos, std::string::npos);
  bytes[pos + key.size() - 1] = '7';
  EXPECT_EQ(load_error(bytes), ErrorKind::kVersionMismatch);
}

TEST(Checkpoint, ShapeInconsistencyIsCorrupt) {
  std::string bytes = serialize_checkpoint(random_checkpoint(6));
  const std::string key = "\"name\":\"projection.bias\"";
  const auto pos = bytes.find(key);
  ASSERT_NE(pos, std::string::npos);
  bytes.replace(pos, key.size(), "\"name\":\"projection.xxxx\"");
  EXPECT_EQ(load_error(bytes), ErrorKind::kCorruptCheckpoint);
}

}  // namespace
}  // namespace seqfuse
