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

#include "qsp/io/tum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <tuple>

#include "qsp/common/error.hpp"

namespace qsp::io {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

bool to_double(const std::string& token, double& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

double number(const std::string& token, const std::string& where) {
  double v = 0;
  require(to_double(token, v), ErrorKind::kParseError, where + ": '" + token + "' is not a number");
  return v;
}

}  // namespace

SequenceConfig parse_sequence_config(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  for (int number_line = 1; std::getline(in, line); ++number_line) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "sequence config line " + std::to_string(number_line);
    require(eq != std::string::npos, ErrorKind::kParseError, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    values[key] = number(trim(line.substr(eq + 1)), where);
  }
  SequenceConfig cfg;
  auto required = [&](const char* key) {
    const auto it = values.find(key);
    require(it != values.end(), ErrorKind::kParseError,
            std::string("sequence config lacks '") + key + "'");
    return it->second;
  };
  auto optional = [&](const char* key, double fallback) {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  };
  auto& k = cfg.intrinsics;
  k.fx = required("fx");
  k.fy = required("fy");
  k.cx = required("cx");
  k.cy = required("cy");
  k.k1 = optional("k1", 0);
  k.k2 = optional("k2", 0);
  k.p1 = optional("p1", 0);
  k.p2 = optional("p2", 0);
  k.k3 = optional("k3", 0);
  cfg.depth_factor = optional("depth_factor", kTumDepthFactor);
  require(k.fx > 0 && k.fy > 0, ErrorKind::kParseError, "focal lengths must be positive");
  require(cfg.depth_factor > 0, ErrorKind::kParseError, "depth_factor must be positive");
  return cfg;
}

SequenceConfig load_sequence_config(const std::filesystem::path& path) {
  return parse_sequence_config(slurp(path));
}

std::vector<std::vector<std::string>> parse_tum_list(const std::string& text,
                                                     const std::string& origin,
                                                     std::size_t min_fields) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  for (int number_line = 1; std::getline(in, line); ++number_line) {
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields(body);
    std::vector<std::string> row{std::istream_iterator<std::string>(fields), {}};
    const std::string where = origin + ":" + std::to_string(number_line);
    require(row.size() >= 1 + min_fields, ErrorKind::kParseError,
            where + ": expected a timestamp and " + std::to_string(min_fields) + " values");
    number(row[0], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TumRecord> parse_image_list(const std::string& text, const std::string& origin) {
  std::vector<TumRecord> records;
  for (auto& row : parse_tum_list(text, origin, 1)) {
    records.push_back({number(row[0], origin), row[1]});
  }
  return records;
}

std::vector<TumPose> parse_trajectory(const std::string& text, const std::string& origin) {
  std::vector<TumPose> poses;
  std::istringstream in(text);
  std::string line;
  for (int number_line = 1; std::getline(in, line); ++number_line) {
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields(body);
    std::vector<std::string> row{std::istream_iterator<std::string>(fields), {}};
    const std::string where = origin + ":" + std::to_string(number_line);
    require(row.size() == 8, ErrorKind::kParseError,
            where + ": expected 'timestamp tx ty tz qx qy qz qw'");
    TumPose pose;
    pose.timestamp = number(row[0], where);
    for (int i = 0; i < 3; ++i) pose.translation[i] = number(row[1 + i], where);
    for (int i = 0; i < 4; ++i) pose.quaternion[i] = number(row[4 + i], where);
    double qn = 0;
    for (double q : pose.quaternion) qn += q * q;
    require(qn > 1e-24, ErrorKind::kParseError, where + ": zero quaternion");
    poses.push_back(pose);
  }
  return poses;
}

std::vector<std::pair<std::size_t, std::size_t>> associate_timestamps(
    const std::vector<double>& a, const std::vector<double>& b, double max_dt) {
  std::vector<std::size_t> order(b.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return b[x] < b[y]; });
  std::vector<double> sorted_b;
  for (auto i : order) sorted_b.push_back(b[i]);

  struct Candidate {
    double dt, ta, tb;
    std::size_t ia, ib;
  };
  std::vector<Candidate> candidates;
  for (std::size_t ia = 0; ia < a.size(); ++ia) {
    auto it = std::lower_bound(sorted_b.begin(), sorted_b.end(), a[ia] - max_dt);
    for (; it != sorted_b.end() && *it <= a[ia] + max_dt; ++it) {
      const std::size_t ib = order[static_cast<std::size_t>(it - sorted_b.begin())];
      candidates.push_back({std::abs(a[ia] - b[ib]), a[ia], b[ib], ia, ib});
    }
  }
  // Keys are timestamps rather than indices so line order cannot matter.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.dt, x.ta, x.tb) < std::tie(y.dt, y.ta, y.tb);
  });
  std::vector<bool> used_a(a.size()), used_b(b.size());
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& c : candidates) {
    if (used_a[c.ia] || used_b[c.ib]) continue;
    used_a[c.ia] = used_b[c.ib] = true;
    pairs.emplace_back(c.ia, c.ib);
  }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
    return std::tie(a[x.first], b[x.second]) < std::tie(a[y.first], b[y.second]);
  });
  return pairs;
}

TumSequence load_tum(const std::filesystem::path& root, double max_dt,
                     const std::optional<std::filesystem::path>& config) {
  TumSequence seq;
  seq.root = root;
  seq.config = load_sequence_config(config ? *config : root / "camera.cfg");
  auto rgb = parse_image_list(slurp(root / "rgb.txt"), (root / "rgb.txt").string());
  auto depth = parse_image_list(slurp(root / "depth.txt"), (root / "depth.txt").string());
  const auto gt_path = root / "groundtruth.txt";
  if (std::filesystem::exists(gt_path)) {
    seq.ground_truth = parse_trajectory(slurp(gt_path), gt_path.string());
  }
  std::sort(seq.ground_truth.begin(), seq.ground_truth.end(),
            [](const TumPose& x, const TumPose& y) { return x.timestamp < y.timestamp; });

  auto stamps = [](const auto& list) {
    std::vector<double> t;
    for (const auto& r : list) t.push_back(r.timestamp);
    return t;
  };
  const auto rgb_t = stamps(rgb);
  const auto gt_t = stamps(seq.ground_truth);
  const auto pairs = associate_timestamps(rgb_t, stamps(depth), max_dt);
  const auto gt_pairs = associate_timestamps(rgb_t, gt_t, max_dt);
  std::map<std::size_t, std::size_t> gt_of;
  for (const auto& [i, j] : gt_pairs) gt_of[i] = j;

  for (const auto& [i, j] : pairs) {
    TumFrame frame;
    frame.timestamp = rgb[i].timestamp;
    frame.rgb = root / rgb[i].path;
    frame.depth = root / depth[j].path;
    frame.depth_timestamp = depth[j].timestamp;
    if (const auto it = gt_of.find(i); it != gt_of.end()) frame.ground_truth = seq.ground_truth[it->second];
    if (!seq.frames.empty() && frame.timestamp <= seq.frames.back().timestamp) {
      ++seq.dropped;  // duplicate timestamp
      continue;
    }
    seq.frames.push_back(std::move(frame));
  }
  seq.dropped += rgb.size() - pairs.size();
  return seq;
}

}  // namespace qsp::io
