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

#include "qsp/vo/odometry.hpp"

#include <cmath>

#include "qsp/vo/camera.hpp"

namespace qsp::vo {

void Trajectory::append(double timestamp, const PoseSE3& pose, std::size_t frame_id) {
  require(entries_.empty() || timestamp > entries_.back().timestamp, ErrorKind::kInvalidArgument,
          "trajectory timestamps must increase strictly");
  entries_.push_back({timestamp, pose, frame_id});
}

VoResult run_sequence(std::size_t count, const FrameSource& source, const CameraIntrinsics& k,
                      const Detector& detector, const VoConfig& cfg, const PoseSE3& seed) {
  require(count > 0, ErrorKind::kInvalidArgument, "empty frame sequence");
  CameraIntrinsics pinhole = k;
  pinhole.k1 = pinhole.k2 = pinhole.p1 = pinhole.p2 = pinhole.k3 = 0;

  VoResult result;
  PoseSE3 world = seed;
  PoseSE3 velocity = PoseSE3::identity();  // last prev -> curr motion
  superpoint::DetectionResult prev_det;
  nn::Tensor prev_depth;
  for (std::size_t i = 0; i < count; ++i) {
    Frame frame = source(i);
    const nn::Tensor gray = undistort(frame.gray, k, Sampling::kBilinear);
    const nn::Tensor depth = undistort(frame.depth, k, Sampling::kNearest);
    superpoint::DetectionResult det = detector(gray);
    FrameReport report;
    report.frame_id = frame.id;
    report.keypoints = det.size();

    if (i > 0) {
      const MatchSet matches = match(prev_det, det, cfg.min_similarity);
      report.matches = matches.size();
      std::vector<Eigen::Vector3d> p3;
      std::vector<Eigen::Vector2d> p2;
      for (const auto& m : matches) {
        const auto& a = prev_det.keypoints[m.prev];
        const auto u = static_cast<long>(std::lround(a.x));
        const auto v = static_cast<long>(std::lround(a.y));
        if (u < 0 || v < 0 || u >= static_cast<long>(prev_depth.width()) ||
            v >= static_cast<long>(prev_depth.height())) {
          continue;
        }
        const auto point = backproject(a.x, a.y, prev_depth(0, static_cast<std::size_t>(v),
                                                             static_cast<std::size_t>(u)),
                                       pinhole, cfg.depth_factor);
        if (!point) continue;
        p3.push_back(*point);
        p2.emplace_back(det.keypoints[m.curr].x, det.keypoints[m.curr].y);
      }
      report.correspondences = p3.size();
      PoseSE3 motion = velocity;
      if (p3.size() >= kMinPnpPoints) {
        const PnpResult pnp = solve_pnp(p3, p2, pinhole, cfg.pnp);
        motion = pnp.pose;
        report.pnp_converged = pnp.converged;
        report.rms = pnp.rms;
      } else {
        report.fallback = true;
      }
      velocity = motion;
      world = world * motion.inverse();
    }
    result.trajectory.append(frame.timestamp, world, frame.id);
    result.frames.push_back(report);
    prev_det = std::move(det);
    prev_depth = depth;
  }
  return result;
}

VoResult run_sequence(std::span<const Frame> frames, const CameraIntrinsics& k,
                      const Detector& detector, const VoConfig& cfg, const PoseSE3& seed) {
  return run_sequence(
      frames.size(), [&](std::size_t i) { return frames[i]; }, k, detector, cfg, seed);
}

}  // namespace qsp::vo
