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

#include "qsp/io/hpatches.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <Eigen/LU>

#include "qsp/common/error.hpp"

namespace qsp::io {

Eigen::Matrix3d parse_homography(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::vector<std::string> tokens{std::istream_iterator<std::string>(in), {}};
  require(tokens.size() == 9, ErrorKind::kParseError,
          origin + ": expected 9 numbers, found " + std::to_string(tokens.size()));
  Eigen::Matrix3d h;
  for (int i = 0; i < 9; ++i) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tokens[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == tokens[i].size() && std::isfinite(v), ErrorKind::kParseError,
            origin + ": '" + tokens[i] + "' is not a number");
    h(i / 3, i % 3) = v;
  }
  require(h(2, 2) != 0, ErrorKind::kParseError, origin + ": h33 is zero");
  h /= h(2, 2);
  require(std::abs(h.determinant()) > 1e-12, ErrorKind::kParseError,
          origin + ": homography is not invertible");
  return h;
}

std::vector<HpatchesSequence> load_hpatches(const std::filesystem::path& root) {
  std::error_code ec;
  require(std::filesystem::is_directory(root, ec), ErrorKind::kIoError,
          root.string() + " is not a directory");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<HpatchesSequence> sequences;
  for (const auto& dir : dirs) {
    HpatchesSequence seq;
    seq.name = dir.filename().string();
    for (int k = 1; k <= 6; ++k) {
      bool found = false;
      for (const char* ext : {".ppm", ".pgm", ".png"}) {
        const auto candidate = dir / (std::to_string(k) + ext);
        if (std::filesystem::exists(candidate)) {
          seq.images[k - 1] = candidate;
          found = true;
          break;
        }
      }
      require(found, ErrorKind::kIoError, dir.string() + ": image " + std::to_string(k) + " is missing");
    }
    for (int k = 2; k <= 6; ++k) {
      const auto path = dir / ("H_1_" + std::to_string(k));
      std::ifstream in(path);
      require(static_cast<bool>(in), ErrorKind::kIoError, "missing homography file " + path.string());
      const std::string text(std::istreambuf_iterator<char>(in), {});
      seq.homographies[k - 2] = parse_homography(text, path.string());
    }
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

}  // namespace qsp::io
