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
#include <optional>
#include <string_view>

namespace qsp::superpoint {

enum class Branch { kEncoder, kDetector, kDescriptor };

struct LayerSpec {
  std::string_view name;
  std::size_t in_channels;
  std::size_t out_channels;
  std::size_t kernel;
  bool relu;        // followed by ReLU (and an activation quantiser)
  bool pool_after;  // followed by 2x2 max pooling
  Branch branch;
};

// Encoder: four blocks of two 3x3 convolutions, pooling after blocks 1-3 so
// the encoder output is (128, H/8, W/8). Both heads branch off conv4b.
inline constexpr std::array<LayerSpec, 12> kLayers{{
    {"conv1a", 1, 64, 3, true, false, Branch::kEncoder},
    {"conv1b", 64, 64, 3, true, true, Branch::kEncoder},
    {"conv2a", 64, 64, 3, true, false, Branch::kEncoder},
    {"conv2b", 64, 64, 3, true, true, Branch::kEncoder},
    {"conv3a", 64, 128, 3, true, false, Branch::kEncoder},
    {"conv3b", 128, 128, 3, true, true, Branch::kEncoder},
    {"conv4a", 128, 128, 3, true, false, Branch::kEncoder},
    {"conv4b", 128, 128, 3, true, false, Branch::kEncoder},
    {"convPa", 128, 256, 3, true, false, Branch::kDetector},
    {"convPb", 256, 65, 1, false, false, Branch::kDetector},
    {"convDa", 128, 256, 3, true, false, Branch::kDescriptor},
    {"convDb", 256, 256, 1, false, false, Branch::kDescriptor},
}};

inline constexpr std::size_t kCellSize = 8;
inline constexpr std::size_t kDetectorChannels = 65;
inline constexpr std::size_t kDescriptorDim = 256;

inline std::optional<LayerSpec> find_layer(std::string_view name) {
  for (const auto& layer : kLayers) {
    if (layer.name == name) return layer;
  }
  return std::nullopt;
}

}  // namespace qsp::superpoint
