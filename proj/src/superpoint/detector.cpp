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

#include "qsp/superpoint/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <unordered_map>

#include "qsp/superpoint/model.hpp"

namespace qsp::superpoint {
namespace {

bool stronger(const Keypoint& a, const Keypoint& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.y, a.x) < std::tie(b.y, b.x);
}

std::int64_t cell_key(std::int64_t cx, std::int64_t cy) {
  return (cx << 32) ^ (cy & 0xffffffff);
}

}  // namespace

void DetectorConfig::validate() const {
  require(conf_threshold >= 0 && conf_threshold <= 1, ErrorKind::kInvalidArgument,
          "confidence threshold must lie in [0, 1]");
  require(nms_radius >= 0, ErrorKind::kInvalidArgument, "NMS radius must be non-negative");
  require(border_margin >= 0, ErrorKind::kInvalidArgument, "border margin must be non-negative");
}

std::vector<Keypoint> nms(std::vector<Keypoint> points, int radius) {
  require(radius >= 0, ErrorKind::kInvalidArgument, "NMS radius must be non-negative");
  std::sort(points.begin(), points.end(), stronger);
  // Kept points bucketed in cells of side radius + 1; a conflict can only
  // come from the 3x3 neighbouring cells.
  const double cell = radius + 1.0;
  std::unordered_map<std::int64_t, std::vector<Keypoint>> grid;
  std::vector<Keypoint> kept;
  for (const auto& p : points) {
    const auto cx = static_cast<std::int64_t>(std::floor(p.x / cell));
    const auto cy = static_cast<std::int64_t>(std::floor(p.y / cell));
    bool suppressed = false;
    for (std::int64_t dy = -1; dy <= 1 && !suppressed; ++dy) {
      for (std::int64_t dx = -1; dx <= 1 && !suppressed; ++dx) {
        const auto it = grid.find(cell_key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (const auto& k : it->second) {
          if (std::max(std::abs(k.x - p.x), std::abs(k.y - p.y)) <= radius) {
            suppressed = true;
            break;
          }
        }
      }
    }
    if (suppressed) continue;
    grid[cell_key(cx, cy)].push_back(p);
    kept.push_back(p);
  }
  return kept;
}

nn::Tensor heatmap_from_logits(const nn::Tensor& logits, nn::SoftmaxMode mode) {
  require(logits.channels() == kDetectorChannels, ErrorKind::kInvalidArgument,
          "detector logits need 65 channels");
  const nn::Tensor prob = nn::softmax_channels(logits, mode);
  const std::size_t cells = kCellSize * kCellSize;
  nn::Tensor kept(nn::Shape{cells, prob.height(), prob.width()});
  std::copy(prob.values().begin(), prob.values().begin() + static_cast<std::ptrdiff_t>(kept.size()),
            kept.values().begin());
  return nn::depth_to_space(kept, kCellSize);
}

std::vector<double> sample_descriptors(const nn::Tensor& desc_map, std::span<const Keypoint> keypoints) {
  const nn::Tensor normalised = nn::l2_normalize_channels(desc_map);
  const double cell = static_cast<double>(kCellSize);
  std::vector<double> out;
  out.reserve(keypoints.size() * desc_map.channels());
  for (const auto& kp : keypoints) {
    auto v = nn::bilinear_sample(normalised, (kp.x + 0.5) / cell - 0.5, (kp.y + 0.5) / cell - 0.5);
    double norm = 0;
    for (double d : v) norm += d * d;
    norm = std::sqrt(norm);
    if (norm > 0) {
      for (double& d : v) d /= norm;
    }
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

DetectionResult detect_from_heatmap(const nn::Tensor& heatmap, const nn::Tensor& desc_map,
                                    const DetectorConfig& cfg) {
  cfg.validate();
  require(heatmap.channels() == 1, ErrorKind::kInvalidArgument, "heatmap must have one channel");
  DetectionResult result;
  result.width = heatmap.width();
  result.height = heatmap.height();
  std::vector<Keypoint> candidates;
  for (std::size_t y = 0; y < heatmap.height(); ++y) {
    for (std::size_t x = 0; x < heatmap.width(); ++x) {
      const double p = heatmap(0, y, x);
      if (p >= cfg.conf_threshold) {
        candidates.push_back({static_cast<double>(x), static_cast<double>(y), p});
      }
    }
  }
  const double m = cfg.border_margin;
  const double w = static_cast<double>(heatmap.width());
  const double h = static_cast<double>(heatmap.height());
  for (const auto& kp : nms(std::move(candidates), cfg.nms_radius)) {
    if (kp.x >= m && kp.x < w - m && kp.y >= m && kp.y < h - m) result.keypoints.push_back(kp);
  }
  std::stable_sort(result.keypoints.begin(), result.keypoints.end(), stronger);
  if (cfg.max_keypoints > 0 && result.keypoints.size() > cfg.max_keypoints) {
    result.keypoints.resize(cfg.max_keypoints);
  }
  result.descriptors = sample_descriptors(desc_map, result.keypoints);
  return result;
}

DetectionResult detect(const nn::Tensor& image, const graph::Graph& g, const DetectorConfig& cfg) {
  const ModelOutputs out = run(g, image);
  return detect_from_heatmap(heatmap_from_logits(out.logits, cfg.softmax), out.descriptors, cfg);
}

}  // namespace qsp::superpoint
