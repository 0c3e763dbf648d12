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
#include <cstdint>
#include <filesystem>
#include <vector>

#include "qsp/nn/tensor.hpp"

namespace qsp::io {

enum class PixelFormat { kGray8, kGray16, kRgb8 };

/// Decoded samples before any conversion, interleaved for RGB.
struct RawImage {
  std::size_t width = 0;
  std::size_t height = 0;
  PixelFormat format = PixelFormat::kGray8;
  std::vector<std::uint16_t> samples;

  std::size_t channels() const { return format == PixelFormat::kRgb8 ? 3 : 1; }
};

/// PNG (8-bit gray/RGB, 16-bit gray; palettes expand to RGB, alpha is
/// dropped) or binary PGM/PPM. Anything else is an io-error.
RawImage read_raw_image(const std::filesystem::path& path);

/// Format chosen by extension: .png, .pgm or .ppm.
void write_raw_image(const std::filesystem::path& path, const RawImage& image);

/// 8-bit data becomes a (1, H, W) grayscale tensor in [0, 1] (RGB via
/// 0.299 R + 0.587 G + 0.114 B); 16-bit data is returned as raw values.
nn::Tensor to_tensor(const RawImage& image);
nn::Tensor decode_image(const std::filesystem::path& path);

/// Rounds [0, 1] grayscale to 8-bit.
RawImage gray8_from_tensor(const nn::Tensor& gray);
/// Stores raw values (for example TUM depth) as 16-bit samples.
RawImage gray16_from_tensor(const nn::Tensor& raw);

}  // namespace qsp::io
