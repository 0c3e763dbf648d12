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

#include <cstddef>
#include <functional>

namespace qsp {

/// Worker-thread cap: QSP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_threads();

/// Runs body(i) for i in [0, count). Iterations are split into contiguous
/// blocks across at most worker_threads() threads; each index is visited
/// exactly once, so results written per index are deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qsp
