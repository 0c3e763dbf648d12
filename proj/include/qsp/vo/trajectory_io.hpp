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

#include <filesystem>
#include <string>

#include "qsp/vo/odometry.hpp"

namespace qsp::vo {

/// One `timestamp tx ty tz qx qy qz qw` line per pose. Timestamps are written
/// in the shortest form that reads back to the same double.
std::string format_tum_trajectory(const Trajectory& trajectory);
Trajectory parse_tum_trajectory(const std::string& text, const std::string& origin = "trajectory");

void write_tum_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory read_tum_trajectory(const std::filesystem::path& path);

std::string format_number(double value);

}  // namespace qsp::vo
