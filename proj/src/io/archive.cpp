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

#include "qsp/io/archive.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "qsp/common/error.hpp"

namespace qsp::io {
namespace {

static_assert(std::endian::native == std::endian::little, "archive packing assumes little-endian");

constexpr const char* kManifest = "manifest.json";
constexpr const char* kBlob = "weights.bin";
constexpr int kVersion = 1;

[[noreturn]] void archive_error(const std::string& message) {
  fail(ErrorKind::kArchiveError, message);
}

template <typename T>
void append(std::string& blob, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  blob.append(bytes, sizeof(T));
}

template <typename T>
T read_at(const std::string& blob, std::size_t offset) {
  T value;
  std::memcpy(&value, blob.data() + offset, sizeof(T));
  return value;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::kIoError, "short write to " + path.string());
}

}  // namespace

std::string_view element_type_name(ElementType type) {
  switch (type) {
    case ElementType::kF32: return "f32";
    case ElementType::kI32: return "i32";
    case ElementType::kF64: return "f64";
  }
  return "?";
}

ElementType element_type_from_name(std::string_view name) {
  if (name == "f32") return ElementType::kF32;
  if (name == "i32") return ElementType::kI32;
  if (name == "f64") return ElementType::kF64;
  archive_error("unknown element type '" + std::string(name) + "'");
}

std::size_t element_size(ElementType type) { return type == ElementType::kF64 ? 8 : 4; }

std::size_t ArchiveTensor::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

const ArchiveTensor* Archive::find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void write_archive(const std::filesystem::path& dir, const Archive& archive) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json manifest;
  manifest["format"] = "qsp-weights";
  manifest["version"] = kVersion;
  manifest["metadata"] = archive.metadata;
  manifest["tensors"] = nlohmann::json::array();
  std::string blob;
  std::set<std::string> names;
  for (const auto& t : archive.tensors) {
    require(names.insert(t.name).second, ErrorKind::kArchiveError, "duplicate tensor " + t.name);
    require(t.values.size() == t.element_count(), ErrorKind::kArchiveError,
            "tensor " + t.name + " has " + std::to_string(t.values.size()) +
                " values for its shape");
    const std::size_t offset = blob.size();
    for (double v : t.values) {
      switch (t.type) {
        case ElementType::kF32: append(blob, static_cast<float>(v)); break;
        case ElementType::kI32: append(blob, static_cast<std::int32_t>(v)); break;
        case ElementType::kF64: append(blob, v); break;
      }
    }
    manifest["tensors"].push_back({{"name", t.name},
                                   {"shape", t.shape},
                                   {"dtype", element_type_name(t.type)},
                                   {"offset", offset},
                                   {"length", blob.size() - offset}});
  }
  write_file(dir / kBlob, blob);
  write_file(dir / kManifest, manifest.dump(2) + "\n");
}

Archive read_archive(const std::filesystem::path& dir) {
  const std::string blob = slurp(dir / kBlob);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(slurp(dir / kManifest));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kArchiveError, "malformed manifest: " + std::string(e.what()));
  }
  Archive archive;
  struct Range {
    std::size_t begin, end;
    std::string name;
  };
  std::vector<Range> ranges;
  try {
    if (manifest.contains("version") && manifest["version"].get<int>() != kVersion) {
      archive_error("unsupported archive version " + manifest["version"].dump());
    }
    if (manifest.contains("metadata")) {
      for (const auto& [key, value] : manifest["metadata"].items()) {
        archive.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    std::set<std::string> names;
    for (const auto& entry : manifest.at("tensors")) {
      ArchiveTensor t;
      t.name = entry.at("name").get<std::string>();
      if (!names.insert(t.name).second) archive_error("duplicate tensor " + t.name);
      t.shape = entry.at("shape").get<std::vector<std::size_t>>();
      t.type = element_type_from_name(entry.at("dtype").get<std::string>());
      const auto offset = entry.at("offset").get<std::size_t>();
      const auto length = entry.at("length").get<std::size_t>();
      const std::size_t size = element_size(t.type);
      if (length != t.element_count() * size) {
        archive_error("tensor " + t.name + " declares " + std::to_string(length) +
                      " bytes but its shape needs " + std::to_string(t.element_count() * size));
      }
      if (offset > blob.size() || length > blob.size() - offset) {
        archive_error("tensor " + t.name + " extends past the end of " + kBlob);
      }
      ranges.push_back({offset, offset + length, t.name});
      t.values.reserve(t.element_count());
      for (std::size_t i = 0; i < t.element_count(); ++i) {
        const std::size_t at = offset + i * size;
        switch (t.type) {
          case ElementType::kF32: t.values.push_back(read_at<float>(blob, at)); break;
          case ElementType::kI32: t.values.push_back(read_at<std::int32_t>(blob, at)); break;
          case ElementType::kF64: t.values.push_back(read_at<double>(blob, at)); break;
        }
      }
      archive.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kArchiveError, "malformed manifest: " + std::string(e.what()));
  }
  std::sort(ranges.begin(), ranges.end(),
            [](const Range& a, const Range& b) { return a.begin < b.begin; });
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].begin < ranges[i - 1].end) {
      archive_error("tensor " + ranges[i].name + " overlaps tensor " + ranges[i - 1].name);
    }
  }
  return archive;
}

}  // namespace qsp::io
