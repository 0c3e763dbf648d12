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

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsp/vo/intrinsics.hpp"

namespace qsp::io {

inline constexpr double kTumDepthFactor = 5000.0;
inline constexpr double kTumMaxDt = 0.02;

struct TumRecord {
  double timestamp = 0;
  std::string path;  // relative to the sequence root, as written in the list
};

/// `timestamp tx ty tz qx qy qz qw`.
struct TumPose {
  double timestamp = 0;
  std::array<double, 3> translation{};
  std::array<double, 4> quaternion{0, 0, 0, 1};  // x, y, z, w
};

struct TumFrame {
  double timestamp = 0;  // rgb timestamp
  std::filesystem::path rgb;
  std::filesystem::path depth;
  double depth_timestamp = 0;
  std::optional<TumPose> ground_truth;
};

struct SequenceConfig {
  vo::CameraIntrinsics intrinsics;
  double depth_factor = kTumDepthFactor;
};

struct TumSequence {
  std::filesystem::path root;
  SequenceConfig config;
  std::vector<TumFrame> frames;
  std::vector<TumPose> ground_truth;
  std::size_t dropped = 0;  // rgb frames without a depth partner
};

/// `key = value` lines; fx, fy, cx, cy are required, k1 k2 p1 p2 k3 and
/// depth_factor optional. `#` starts a comment.
SequenceConfig parse_sequence_config(const std::string& text);
SequenceConfig load_sequence_config(const std::filesystem::path& path);

/// `timestamp value...` lists; blank lines and `#` comments are skipped.
/// `min_fields` counts the values after the timestamp.
std::vector<std::vector<std::string>> parse_tum_list(const std::string& text,
                                                     const std::string& origin,
                                                     std::size_t min_fields);
std::vector<TumRecord> parse_image_list(const std::string& text, const std::string& origin);
std::vector<TumPose> parse_trajectory(const std::string& text, const std::string& origin);

/// Greedy one-to-one pairing by smallest |ta - tb| among pairs within max_dt;
/// returns index pairs sorted by the first timestamp.
std::vector<std::pair<std::size_t, std::size_t>> associate_timestamps(
    const std::vector<double>& a, const std::vector<double>& b, double max_dt);

/// Reads rgb.txt, depth.txt and, when present, groundtruth.txt under `root`. The camera
/// config is `config` if given, else `<root>/camera.cfg`.
TumSequence load_tum(const std::filesystem::path& root, double max_dt = kTumMaxDt,
                     const std::optional<std::filesystem::path>& config = std::nullopt);

}  // namespace qsp::io
