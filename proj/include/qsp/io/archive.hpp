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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qsp::io {

/// f32 and i32 are the interchange types; f64 is used for compiler dumps whose
/// rescaled parameters must survive a round trip exactly.
enum class ElementType { kF32, kI32, kF64 };

std::string_view element_type_name(ElementType type);
ElementType element_type_from_name(std::string_view name);
std::size_t element_size(ElementType type);

struct ArchiveTensor {
  std::string name;
  std::vector<std::size_t> shape;
  ElementType type = ElementType::kF32;
  std::vector<double> values;

  std::size_t element_count() const;
};

/// `manifest.json` + `weights.bin` in one directory. The blob is packed
/// little-endian in manifest order.
struct Archive {
  std::vector<ArchiveTensor> tensors;
  std::map<std::string, std::string> metadata;
  /// Non-fatal findings from reading (unknown tensors and the like).
  std::vector<std::string> warnings;

  const ArchiveTensor* find(std::string_view name) const;
};

void write_archive(const std::filesystem::path& dir, const Archive& archive);

/// Throws io-error when files are missing, archive-error naming the tensor on
/// overlapping ranges, bad lengths, duplicate names or unknown element types.
Archive read_archive(const std::filesystem::path& dir);

}  // namespace qsp::io
