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

#ifndef SEQFUSE_ERROR_HPP_
#define SEQFUSE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqfuse {

enum class ErrorKind {
  kMalformedRow,
  kDimMismatch,
  kEmptyTrack,
  kLengthMismatch,
  kTraceMismatch,
  kEmptySequence,
  kShapeMismatch,
  kEmptyDataset,
  kTargetMissing,
  kDegenerateInput,
  kInvalidArgument,
  kIoFailure,
  kVersionMismatch,
  kCorruptCheckpoint,
};

std::string_view to_string(ErrorKind kind);

/// All library failures are reported as seqfuse::Error. The kind is stable
/// and is what callers (the CLI in particular) dispatch on; the message is
/// for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace seqfuse

#endif  // SEQFUSE_ERROR_HPP_
