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

#include "qsp/superpoint/detector.hpp"

namespace qsp::superpoint {

/// uint32 count, then per keypoint f32 x, y, score and 256 f32 descriptor
/// values, all little-endian.
std::string encode_detections(const DetectionResult& result);
DetectionResult decode_detections(const std::string& bytes);

void write_detections(const std::filesystem::path& path, const DetectionResult& result);
DetectionResult read_detections(const std::filesystem::path& path);

/// JSON document with image size, keypoints and descriptors.
std::string detections_to_json(const DetectionResult& result, bool include_descriptors = true);

}  // namespace qsp::superpoint
