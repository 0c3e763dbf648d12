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

#include "qsp/superpoint/detection_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

namespace qsp::superpoint {
namespace {

static_assert(std::endian::native == std::endian::little, "detection files are little-endian");

template <typename T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  require(in.size() - pos >= sizeof(T), ErrorKind::kParseError, "truncated detection file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_detections(const DetectionResult& result) {
  std::string out;
  put(out, static_cast<std::uint32_t>(result.size()));
  for (std::size_t i = 0; i < result.size(); ++i) {
    const auto& kp = result.keypoints[i];
    put(out, static_cast<float>(kp.x));
    put(out, static_cast<float>(kp.y));
    put(out, static_cast<float>(kp.score));
    for (double d : result.descriptor(i)) put(out, static_cast<float>(d));
  }
  return out;
}

DetectionResult decode_detections(const std::string& bytes) {
  std::size_t pos = 0;
  const auto count = get<std::uint32_t>(bytes, pos);
  const std::size_t record = (3 + kDescriptorDim) * sizeof(float);
  require((bytes.size() - pos) == count * record, ErrorKind::kParseError,
          "detection file length does not match its count");
  DetectionResult result;
  for (std::uint32_t i = 0; i < count; ++i) {
    Keypoint kp;
    kp.x = get<float>(bytes, pos);
    kp.y = get<float>(bytes, pos);
    kp.score = get<float>(bytes, pos);
    result.keypoints.push_back(kp);
    for (std::size_t d = 0; d < kDescriptorDim; ++d) result.descriptors.push_back(get<float>(bytes, pos));
  }
  return result;
}

void write_detections(const std::filesystem::path& path, const DetectionResult& result) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path.string());
  const std::string bytes = encode_detections(result);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

DetectionResult read_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path.string());
  return decode_detections(std::string(std::istreambuf_iterator<char>(in), {}));
}

std::string detections_to_json(const DetectionResult& result, bool include_descriptors) {
  nlohmann::json doc;
  doc["width"] = result.width;
  doc["height"] = result.height;
  doc["count"] = result.size();
  nlohmann::json kps = nlohmann::json::array();
  for (std::size_t i = 0; i < result.size(); ++i) {
    const auto& kp = result.keypoints[i];
    nlohmann::json j{{"x", kp.x}, {"y", kp.y}, {"score", kp.score}};
    if (include_descriptors) {
      const auto d = result.descriptor(i);
      j["descriptor"] = std::vector<double>(d.begin(), d.end());
    }
    kps.push_back(std::move(j));
  }
  doc["keypoints"] = std::move(kps);
  return doc.dump(2) + "\n";
}

}  // namespace qsp::superpoint
