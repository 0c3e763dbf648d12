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
#include <span>
#include <vector>

#include "qsp/nn/tensor.hpp"
#include "qsp/superpoint/detector.hpp"
#include "qsp/vo/geometry.hpp"
#include "qsp/vo/intrinsics.hpp"
#include "qsp/vo/matching.hpp"
#include "qsp/vo/pnp.hpp"

namespace qsp::vo {

struct Frame {
  double timestamp = 0;
  std::size_t id = 0;
  nn::Tensor gray;   // (1, H, W) in [0, 1]
  nn::Tensor depth;  // (1, H, W) raw sensor units
};

struct TrajectoryEntry {
  double timestamp = 0;
  PoseSE3 pose;  // camera to world
  std::size_t frame_id = 0;
};

class Trajectory {
 public:
  /// Throws invalid-argument unless `timestamp` exceeds the last one.
  void append(double timestamp, const PoseSE3& pose, std::size_t frame_id);

  const std::vector<TrajectoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TrajectoryEntry& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<TrajectoryEntry> entries_;
};

struct VoConfig {
  double min_similarity = kDefaultMinSimilarity;
  double depth_factor = 5000.0;
  PnpOptions pnp;
};

struct FrameReport {
  std::size_t frame_id = 0;
  std::size_t keypoints = 0;
  std::size_t matches = 0;
  std::size_t correspondences = 0;  // matches with valid depth
  bool fallback = false;            // constant-velocity motion reused
  bool pnp_converged = false;
  double rms = 0;                   // px, at the PnP solution
};

struct VoResult {
  Trajectory trajectory;
  std::vector<FrameReport> frames;
};

using Detector = std::function<superpoint::DetectionResult(const nn::Tensor& gray)>;
using FrameSource = std::function<Frame(std::size_t index)>;

/// Frame-to-frame odometry: undistort, detect, match against the previous
/// frame, PnP on matches with depth, and W_curr = W_prev * T^-1. Frames where
/// PnP cannot run reuse the previous relative motion and are flagged. Frames
/// are pulled one at a time from `source`.
VoResult run_sequence(std::size_t count, const FrameSource& source, const CameraIntrinsics& k,
                      const Detector& detector, const VoConfig& cfg,
                      const PoseSE3& seed = PoseSE3::identity());

VoResult run_sequence(std::span<const Frame> frames, const CameraIntrinsics& k,
                      const Detector& detector, const VoConfig& cfg,
                      const PoseSE3& seed = PoseSE3::identity());

}  // namespace qsp::vo
