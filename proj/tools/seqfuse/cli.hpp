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

#ifndef SEQFUSE_TOOLS_CLI_HPP_
#define SEQFUSE_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "seqfuse/error.hpp"

namespace seqfuse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitIoError = 3,
  kExitInternalError = 4,
};

int exit_code_for(ErrorKind kind);

/// Runs `seqfuse <args...>`; args excludes the program name. Normal output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqfuse::cli

#endif  // SEQFUSE_TOOLS_CLI_HPP_
