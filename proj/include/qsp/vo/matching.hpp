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
#include <vector>

#include "qsp/superpoint/detector.hpp"

namespace qsp::vo {

struct Match {
  std::size_t prev = 0;
  std::size_t curr = 0;
  double similarity = 0;

  bool operator==(const Match&) const = default;
};

using MatchSet = std::vector<Match>;

inline constexpr double kDefaultMinSimilarity = 0.7;

/// Mutual nearest neighbours under dot-product similarity, ordered by `prev`.
/// Pairs below `min_similarity` are dropped; exact ties go to the lower index.
MatchSet match(const superpoint::DetectionResult& a, const superpoint::DetectionResult& b,
               double min_similarity = kDefaultMinSimilarity);

}  // namespace qsp::vo
