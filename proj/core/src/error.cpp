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

#include "seqfuse/error.hpp"

namespace seqfuse {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedRow: return "MalformedRow";
    case ErrorKind::kDimMismatch: return "DimMismatch";
    case ErrorKind::kEmptyTrack: return "EmptyTrack";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kTraceMismatch: return "TraceMismatch";
    case ErrorKind::kEmptySequence: return "EmptySequence";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kEmptyDataset: return "EmptyDataset";
    case ErrorKind::kTargetMissing: return "TargetMissing";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIoFailure: return "IoFailure";
    case ErrorKind::kVersionMismatch: return "VersionMismatch";
    case ErrorKind::kCorruptCheckpoint: return "CorruptCheckpoint";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace seqfuse
