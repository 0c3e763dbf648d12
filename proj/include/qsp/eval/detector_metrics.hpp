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

#include <Eigen/Core>

#include "qsp/superpoint/detector.hpp"

namespace qsp::eval {

inline constexpr std::size_t kDefaultTopK = 300;
inline constexpr double kDefaultEps = 3.0;

struct ImageSize {
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Highest-scoring `k` points, stable for equal scores.
std::vector<superpoint::Keypoint> top_k(std::vector<superpoint::Keypoint> points, std::size_t k);

/// Symmetric repeatability. a's points are warped by `h` into b and kept when
/// inside b; b's points are warped by h^-1 into a and kept when inside a. The
/// score counts kept a-points with a b-point within `eps` (measured in b) plus
/// kept b-points with an a-point within `eps` (measured in a), divided by the
/// number of kept points. undefined-metric when nothing is kept.
double repeatability(const std::vector<superpoint::Keypoint>& a,
                     const std::vector<superpoint::Keypoint>& b, const Eigen::Matrix3d& h,
                     ImageSize size_a, ImageSize size_b, double eps = kDefaultEps,
                     std::size_t k = kDefaultTopK);

/// Mean nearest-neighbour distance over the correspondences counted by
/// repeatability. undefined-metric when there are none.
double localization_error(const std::vector<superpoint::Keypoint>& a,
                          const std::vector<superpoint::Keypoint>& b, const Eigen::Matrix3d& h,
                          ImageSize size_a, ImageSize size_b, double eps = kDefaultEps,
                          std::size_t k = kDefaultTopK);

}  // namespace qsp::eval
