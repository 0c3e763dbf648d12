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

#include "qsp/vo/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>

#include "qsp/io/tum.hpp"

namespace qsp::vo {

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string format_tum_trajectory(const Trajectory& trajectory) {
  std::string out = "# timestamp tx ty tz qx qy qz qw\n";
  for (const auto& e : trajectory.entries()) {
    out += format_number(e.timestamp);
    for (int i = 0; i < 3; ++i) out += " " + format_number(e.pose.translation[i]);
    for (double q : e.pose.quaternion()) out += " " + format_number(q);
    out += "\n";
  }
  return out;
}

Trajectory parse_tum_trajectory(const std::string& text, const std::string& origin) {
  auto poses = io::parse_trajectory(text, origin);
  std::stable_sort(poses.begin(), poses.end(),
                   [](const io::TumPose& a, const io::TumPose& b) { return a.timestamp < b.timestamp; });
  Trajectory trajectory;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto& p = poses[i];
    require(trajectory.empty() || p.timestamp > trajectory.entries().back().timestamp,
            ErrorKind::kParseError, origin + ": duplicate timestamp " + format_number(p.timestamp));
    trajectory.append(p.timestamp,
                      PoseSE3::from_quaternion(p.quaternion, Eigen::Vector3d(p.translation[0],
                                                                             p.translation[1],
                                                                             p.translation[2])),
                      i);
  }
  return trajectory;
}

void write_tum_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path.string());
  out << format_tum_trajectory(trajectory);
}

Trajectory read_tum_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path.string());
  return parse_tum_trajectory(std::string(std::istreambuf_iterator<char>(in), {}), path.string());
}

}  // namespace qsp::vo
