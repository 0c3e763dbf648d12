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
#include <utility>
#include <vector>

#include "qsp/vo/odometry.hpp"

namespace qsp::eval {

inline constexpr double kDefaultMaxDt = 0.02;
inline constexpr double kDefaultRpeDelta = 1.0;

using PosePairs = std::vector<std::pair<std::size_t, std::size_t>>;  // (est, gt)

/// Greedy nearest-timestamp pairing, each pose used at most once, sorted by
/// estimate time. undefined-metric when no pair is within `max_dt`.
PosePairs associate(const vo::Trajectory& est, const vo::Trajectory& gt,
                    double max_dt = kDefaultMaxDt);

struct PoseError {
  double rot_deg = 0;
  double trans = 0;  // m for APE, m/s for RPE
  std::size_t count = 0;
};

/// RMSE of E = Q^-1 P over associated pairs, with no alignment.
PoseError ape(const vo::Trajectory& est, const vo::Trajectory& gt, double max_dt = kDefaultMaxDt);

/// RMSE of E = (Q_i^-1 Q_j)^-1 (P_i^-1 P_j), j the first pair at least `delta`
/// seconds after i; translation divided by t_j - t_i.
PoseError rpe(const vo::Trajectory& est, const vo::Trajectory& gt, double delta = kDefaultRpeDelta,
              double max_dt = kDefaultMaxDt);

struct AngleSample {
  double timestamp = 0;
  double est_roll = 0, est_pitch = 0, est_yaw = 0;  // degrees, ZYX
  double gt_roll = 0, gt_pitch = 0, gt_yaw = 0;
};

std::vector<AngleSample> angle_traces(const vo::Trajectory& est, const vo::Trajectory& gt,
                                      double max_dt = kDefaultMaxDt);

}  // namespace qsp::eval
