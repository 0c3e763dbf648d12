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
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qsp::io {

/// Image 1 is the reference; homographies[k] maps image 1 to image k + 2.
struct HpatchesSequence {
  std::string name;
  std::array<std::filesystem::path, 6> images;
  std::array<Eigen::Matrix3d, 5> homographies;
};

/// Nine whitespace-separated reals, row-major, scaled so h33 = 1. Wrong
/// arity, h33 = 0 or a singular matrix is a parse-error.
Eigen::Matrix3d parse_homography(const std::string& text, const std::string& origin = "homography");

/// Every subdirectory of `root` is a sequence holding images 1..6 (.ppm,
/// .pgm or .png) and H_1_2 .. H_1_6. Sequences are sorted by name.
std::vector<HpatchesSequence> load_hpatches(const std::filesystem::path& root);

}  // namespace qsp::io
