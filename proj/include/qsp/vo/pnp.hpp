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

#include <span>

#include <Eigen/Core>

#include "qsp/vo/geometry.hpp"
#include "qsp/vo/intrinsics.hpp"

namespace qsp::vo {

inline constexpr std::size_t kMinPnpPoints = 6;

struct PnpOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  bool huber = false;  // robust loss, off by default
  double huber_delta = 1.0;  // px
};

struct PnpResult {
  PoseSE3 pose;
  bool converged = false;
  int iterations = 0;
  double initial_cost = 0;  // sum of squared reprojection errors at identity
  double final_cost = 0;
  double rms = 0;  // px
};

/// Sum of squared reprojection errors; points at z <= 0 add a fixed penalty.
double reprojection_cost(const PoseSE3& pose, std::span<const Eigen::Vector3d> points3d,
                         std::span<const Eigen::Vector2d> points2d, const CameraIntrinsics& k);

/// Levenberg-Marquardt over left-multiplied se(3) updates starting from the
/// identity, using every correspondence. Fewer than six correspondences is
/// insufficient-matches; non-convergence is reported through `converged`.
PnpResult solve_pnp(std::span<const Eigen::Vector3d> points3d,
                    std::span<const Eigen::Vector2d> points2d, const CameraIntrinsics& k,
                    const PnpOptions& options = {});

}  // namespace qsp::vo
