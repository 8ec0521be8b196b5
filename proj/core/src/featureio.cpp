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

#include "seqfuse/featureio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "seqfuse/error.hpp"

namespace seqfuse {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(begin));
      break;
    }
    cells.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string where(std::string_view source, std::size_t line_no) {
  std::ostringstream os;
  os << source << ":" << line_no;
  return os.str();
}

std::int64_t parse_int_cell(std::string_view cell, std::string_view source,
                            std::size_t line_no) {
  cell = trim(cell);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorKind::kMalformedRow, where(source, line_no) + ": not an integer: '" +
                                              std::string(cell) + "'");
  }
  return value;
}

double parse_real_cell(std::string_view cell, std::string_view source, std::size_t line_no) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorKind::kMalformedRow, where(source, line_no) + ": not a number: '" +
                                              std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kMalformedRow,
                where(source, line_no) + ": non-finite value '" + std::string(cell) + "'");
  }
  return value;
}

// Reads all lines, dropping trailing blank ones. Interior blank lines are
// reported as malformed by the callers.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "write failed for " + path.string());
}

bool token_order(const TokenFeature& a, const TokenFeature& b) {
  if (a.start_ms != b.start_ms) return a.start_ms < b.start_ms;
  if (a.end_ms != b.end_ms) return a.end_ms < b.end_ms;
  return a.values < b.values;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "unformattable double");
  return std::string(buf, ptr);
}

TokenTrack parse_feature_csv(std::istream& in, std::string track_name,
                             std::optional<std::size_t> expected_dim,
                             std::string_view source) {
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty()) throw Error(ErrorKind::kEmptyTrack, std::string(source) + ": no header");

  const auto header = split_commas(lines.front());
  if (header.size() < 3 || trim(header[0]) != "start_ms" || trim(header[1]) != "end_ms") {
    throw Error(ErrorKind::kMalformedRow,
                where(source, 1) + ": header must be start_ms,end_ms,f0,...");
  }
  TokenTrack track;
  track.name = std::move(track_name);
  track.dim = header.size() - 2;
  if (expected_dim && *expected_dim != track.dim) {
    throw Error(ErrorKind::kDimMismatch, std::string(source) + ": expected dim " +
                                             std::to_string(*expected_dim) + ", header has " +
                                             std::to_string(track.dim));
  }

  track.tokens.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto cells = split_commas(lines[i]);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kMalformedRow,
                  where(source, line_no) + ": expected " + std::to_string(header.size()) +
                      " columns, found " + std::to_string(cells.size()));
    }
    TokenFeature token;
    token.start_ms = parse_int_cell(cells[0], source, line_no);
    token.end_ms = parse_int_cell(cells[1], source, line_no);
    if (token.start_ms >= token.end_ms) {
      throw Error(ErrorKind::kMalformedRow, where(source, line_no) + ": empty span");
    }
    token.values.reserve(track.dim);
    for (std::size_t c = 2; c < cells.size(); ++c) {
      token.values.push_back(parse_real_cell(cells[c], source, line_no));
    }
    track.tokens.push_back(std::move(token));
  }
  if (track.tokens.empty()) {
    throw Error(ErrorKind::kEmptyTrack, std::string(source) + ": no data rows");
  }
  std::stable_sort(track.tokens.begin(), track.tokens.end(),
                   [](const TokenFeature& a, const TokenFeature& b) {
                     return a.start_ms < b.start_ms;
                   });
  return track;
}

TokenTrack parse_feature_csv(const std::filesystem::path& path,
                             std::optional<std::size_t> expected_dim) {
  std::ifstream in = open_input(path);
  return parse_feature_csv(in, path.stem().string(), expected_dim, path.string());
}

void write_feature_csv(const TokenTrack& track, std::ostream& out) {
  out << "start_ms,end_ms";
  for (std::size_t k = 0; k < track.dim; ++k) out << ",f" << k;
  out << '\n';
  for (const TokenFeature& token : track.tokens) {
    if (token.values.size() != track.dim) {
      throw Error(ErrorKind::kDimMismatch, "token vector length differs from track dim");
    }
    out << token.start_ms << ',' << token.end_ms;
    for (double v : token.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_feature_csv(const TokenTrack& track, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  write_feature_csv(track, out);
  finish_output(out, path);
}

Vector parse_label_csv(std::istream& in, std::int64_t frame_len_ms, std::string_view source) {
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty()) throw Error(ErrorKind::kEmptySequence, std::string(source) + ": no header");
  const auto header = split_commas(lines.front());
  if (header.size() != 2 || trim(header[0]) != "frame_ms") {
    throw Error(ErrorKind::kMalformedRow, where(source, 1) + ": header must be frame_ms,value");
  }
  Vector values;
  values.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto cells = split_commas(lines[i]);
    if (cells.size() != 2) {
      throw Error(ErrorKind::kMalformedRow, where(source, line_no) + ": expected 2 columns");
    }
    const std::int64_t frame_ms = parse_int_cell(cells[0], source, line_no);
    const auto j = static_cast<std::int64_t>(values.size());
    if (frame_ms != j * frame_len_ms) {
      throw Error(ErrorKind::kMalformedRow, where(source, line_no) + ": frame_ms " +
                                                std::to_string(frame_ms) + ", expected " +
                                                std::to_string(j * frame_len_ms));
    }
    const double value = parse_real_cell(cells[1], source, line_no);
    if (value < -1.0 || value > 1.0) {
      throw Error(ErrorKind::kMalformedRow,
                  where(source, line_no) + ": label outside [-1, 1]");
    }
    values.push_back(value);
  }
  if (values.empty()) throw Error(ErrorKind::kEmptySequence, std::string(source) + ": no rows");
  return values;
}

Vector parse_label_csv(const std::filesystem::path& path, std::int64_t frame_len_ms) {
  std::ifstream in = open_input(path);
  return parse_label_csv(in, frame_len_ms, path.string());
}

void write_label_csv(std::span<const double> values, std::int64_t frame_len_ms,
                     std::ostream& out, std::string_view value_column) {
  out << "frame_ms," << value_column << '\n';
  for (std::size_t j = 0; j < values.size(); ++j) {
    out << static_cast<std::int64_t>(j) * frame_len_ms << ',' << format_double(values[j])
        << '\n';
  }
}

void write_label_csv(std::span<const double> values, std::int64_t frame_len_ms,
                     const std::filesystem::path& path, std::string_view value_column) {
  std::ofstream out = open_output(path);
  write_label_csv(values, frame_len_ms, out, value_column);
  finish_output(out, path);
}

FrameTrack align_tokens_to_frames(const TokenTrack& track, std::int64_t frame_len_ms,
                                  std::size_t n_frames) {
  if (frame_len_ms < 1 || n_frames < 1) {
    throw Error(ErrorKind::kInvalidArgument, "frame_len_ms and n_frames must be positive");
  }
  std::vector<const TokenFeature*> ordered;
  ordered.reserve(track.tokens.size());
  for (const TokenFeature& token : track.tokens) {
    if (token.values.size() != track.dim) {
      throw Error(ErrorKind::kDimMismatch, "token vector length differs from track dim");
    }
    if (token.start_ms >= token.end_ms) {
      throw Error(ErrorKind::kInvalidArgument, "token with empty span");
    }
    ordered.push_back(&token);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const TokenFeature* a, const TokenFeature* b) { return token_order(*a, *b); });

  FrameTrack out;
  out.name = track.name;
  out.dim = track.dim;
  out.frame_len_ms = frame_len_ms;
  out.frames = Matrix(n_frames, track.dim, 0.0);
  std::vector<std::size_t> counts(n_frames, 0);

  const auto last_frame = static_cast<std::int64_t>(n_frames) - 1;
  for (const TokenFeature* token : ordered) {
    if (token->end_ms <= 0) continue;
    const std::int64_t first = std::max<std::int64_t>(0, floor_div(token->start_ms, frame_len_ms));
    const std::int64_t last = std::min(last_frame, floor_div(token->end_ms - 1, frame_len_ms));
    for (std::int64_t j = first; j <= last; ++j) {
      auto row = out.frames.row(static_cast<std::size_t>(j));
      for (std::size_t k = 0; k < track.dim; ++k) row[k] += token->values[k];
      ++counts[static_cast<std::size_t>(j)];
    }
  }
  for (std::size_t j = 0; j < n_frames; ++j) {
    if (counts[j] == 0) continue;
    const auto n = static_cast<double>(counts[j]);
    for (double& v : out.frames.row(j)) v /= n;
  }
  return out;
}

TokenTrack frames_to_tokens(const FrameTrack& track) {
  TokenTrack out;
  out.name = track.name;
  out.dim = track.dim;
  out.tokens.reserve(track.n_frames());
  for (std::size_t j = 0; j < track.n_frames(); ++j) {
    const auto row = track.frames.row(j);
    const auto start = static_cast<std::int64_t>(j) * track.frame_len_ms;
    out.tokens.push_back({start, start + track.frame_len_ms, Vector(row.begin(), row.end())});
  }
  return out;
}

FusedSequence fuse(std::span<const FrameTrack> tracks, LabelMap labels, std::string video_id) {
  if (tracks.empty()) throw Error(ErrorKind::kInvalidArgument, "fuse needs at least one track");
  const std::size_t t = tracks.front().n_frames();
  std::size_t width = 0;
  for (const FrameTrack& track : tracks) {
    if (track.n_frames() != t) {
      throw Error(ErrorKind::kLengthMismatch,
                  "track '" + track.name + "' has " + std::to_string(track.n_frames()) +
                      " frames, expected " + std::to_string(t));
    }
    if (track.frames.cols() != track.dim) {
      throw Error(ErrorKind::kDimMismatch, "track '" + track.name + "' width differs from dim");
    }
    width += track.dim;
  }
  for (const auto& [target, values] : labels) {
    if (values.size() != t) {
      throw Error(ErrorKind::kLengthMismatch,
                  "label '" + target + "' has " + std::to_string(values.size()) +
                      " frames, expected " + std::to_string(t));
    }
  }

  FusedSequence fused;
  fused.video_id = std::move(video_id);
  fused.data = Matrix(t, width);
  fused.labels = std::move(labels);
  for (std::size_t j = 0; j < t; ++j) {
    auto dst = fused.data.row(j).begin();
    for (const FrameTrack& track : tracks) {
      const auto src = track.frames.row(j);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  for (const FrameTrack& track : tracks) {
    fused.track_names.push_back(track.name);
    fused.track_dims.push_back(track.dim);
  }
  return fused;
}

Matrix track_block(const FusedSequence& fused, std::size_t index) {
  if (index >= fused.track_dims.size()) {
    throw Error(ErrorKind::kInvalidArgument, "track index out of range");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < index; ++i) offset += fused.track_dims[i];
  const std::size_t dim = fused.track_dims[index];
  Matrix block(fused.n_frames(), dim);
  for (std::size_t j = 0; j < fused.n_frames(); ++j) {
    const auto row = fused.data.row(j);
    std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(offset), dim, block.row(j).begin());
  }
  return block;
}

}  // namespace seqfuse
