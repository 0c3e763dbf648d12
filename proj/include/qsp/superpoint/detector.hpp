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
#include <span>
#include <vector>

#include "qsp/graph/ir.hpp"
#include "qsp/nn/ops.hpp"
#include "qsp/superpoint/architecture.hpp"

namespace qsp::superpoint {

struct DetectorConfig {
  double conf_threshold = 0.015;
  int nms_radius = 4;
  int border_margin = 4;
  std::size_t max_keypoints = 1000;  // 0 keeps every keypoint
  nn::SoftmaxMode softmax = nn::SoftmaxMode::float_e();

  void validate() const;
};

struct Keypoint {
  double x = 0;
  double y = 0;
  double score = 0;

  bool operator==(const Keypoint&) const = default;
};

struct DetectionResult {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Keypoint> keypoints;
  std::vector<double> descriptors;  // keypoints.size() x kDescriptorDim, row-major

  std::size_t size() const { return keypoints.size(); }
  std::span<const double> descriptor(std::size_t i) const {
    return std::span<const double>(descriptors).subspan(i * kDescriptorDim, kDescriptorDim);
  }
};

/// Greedy suppression by descending score (ties in raster order, y then x):
/// a point survives iff no kept point is within Chebyshev distance <= radius.
std::vector<Keypoint> nms(std::vector<Keypoint> points, int radius);

/// Softmax over the 65 channels, dustbin dropped without renormalising, then
/// depth_to_space to a (1, H, W) probability map.
nn::Tensor heatmap_from_logits(const nn::Tensor& logits, nn::SoftmaxMode mode);

/// L2-normalises the coarse map, samples it bilinearly at
/// ((x + 0.5) / 8 - 0.5, (y + 0.5) / 8 - 0.5) and normalises each sample.
std::vector<double> sample_descriptors(const nn::Tensor& desc_map, std::span<const Keypoint> keypoints);

/// Threshold, NMS, border removal, sort and truncate, then descriptors.
DetectionResult detect_from_heatmap(const nn::Tensor& heatmap, const nn::Tensor& desc_map,
                                    const DetectorConfig& cfg);

DetectionResult detect(const nn::Tensor& image, const graph::Graph& g, const DetectorConfig& cfg);

}  // namespace qsp::superpoint
