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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qsp/superpoint/detector.hpp"

namespace qsp::eval {

Eigen::Vector2d apply_homography(const Eigen::Matrix3d& h, const Eigen::Vector2d& p);

/// Normalised DLT over all correspondences (least squares for more than
/// four). nullopt for fewer than four points or a degenerate configuration.
std::optional<Eigen::Matrix3d> fit_homography(std::span<const Eigen::Vector2d> src,
                                              std::span<const Eigen::Vector2d> dst);

struct RansacOptions {
  double threshold = 3.0;  // px
  int iterations = 1000;
  std::uint64_t seed = 0;
};

struct HomographyEstimate {
  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  std::vector<std::size_t> inliers;
};

/// 4-point RANSAC followed by a least-squares refit on the inliers.
/// estimation-failed when fewer than four correspondences or no model with
/// four inliers exists.
HomographyEstimate estimate_homography(std::span<const Eigen::Vector2d> src,
                                       std::span<const Eigen::Vector2d> dst,
                                       const RansacOptions& options = {});

/// Mean distance between the four image corners mapped by `estimate` and by
/// `truth`, corners (0, 0), (W-1, 0), (0, H-1), (W-1, H-1).
double corner_error(const Eigen::Matrix3d& estimate, const Eigen::Matrix3d& truth,
                    std::size_t width, std::size_t height);

struct HomographyScore {
  bool correct = false;
  double corner_error = 0;
  std::size_t matches = 0;
  std::size_t inliers = 0;
  bool estimated = false;  // false when estimation failed
};

/// Mutual-NN matches, RANSAC homography, corner error against `truth` on an
/// image of size `width` x `height` (image a). Estimation failures count as
/// incorrect with an infinite corner error.
HomographyScore homography_score(const superpoint::DetectionResult& a,
                                 const superpoint::DetectionResult& b, const Eigen::Matrix3d& truth,
                                 std::size_t width, std::size_t height, double e = 3.0,
                                 const RansacOptions& options = {});

}  // namespace qsp::eval
