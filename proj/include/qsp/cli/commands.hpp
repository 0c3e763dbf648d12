// Copyright 2026 The QSP Authors. All Rights Reserved.
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qsp/common/error.hpp"

namespace qsp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitCompute = 3;

/// Usage and configuration problems give 1, unreadable or malformed inputs
/// give 2, and everything else 3.
int exit_code(ErrorKind kind);

/// Entry point behind the `qsp` binary. `args` excludes the program name.
/// Subcommands: extract, compile, eval-hpatches, run-vo, eval-trajectory,
/// make-weights.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsp::cli
