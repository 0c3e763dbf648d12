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

#include "qsp/common/error.hpp"

namespace qsp {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kUnsupportedTransform: return "unsupported-transform";
    case ErrorKind::kUnsupportedWidth: return "unsupported-width";
    case ErrorKind::kInvalidGraph: return "invalid-graph";
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kUndefinedMetric: return "undefined-metric";
    case ErrorKind::kEstimationFailed: return "estimation-failed";
    case ErrorKind::kInsufficientMatches: return "insufficient-matches";
    case ErrorKind::kIoError: return "io-error";
    case ErrorKind::kParseError: return "parse-error";
    case ErrorKind::kArchiveError: return "archive-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace qsp
