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

#include <cstdint>
#include <span>
#include <vector>

#include "qsp/graph/ir.hpp"
#include "qsp/nn/tensor.hpp"
#include "qsp/quant/bitwidth.hpp"
#include "qsp/superpoint/weights.hpp"

namespace qsp::superpoint {

inline constexpr const char* kLogitsOutput = "logits";
inline constexpr const char* kDescriptorOutput = "descriptors";

struct ModelOutputs {
  nn::Tensor logits;       // (65, H/8, W/8)
  nn::Tensor descriptors;  // (256, H/8, W/8), not normalised
};

/// Throws invalid-argument unless the image is (1, H, W) with H and W
/// positive multiples of 8.
void check_image(const nn::Tensor& image);

/// Seeded random-texture images in [0, 1] quantised to 8-bit levels.
std::vector<nn::Tensor> synthetic_images(std::size_t count, std::size_t height, std::size_t width,
                                         std::uint64_t seed);

/// Builds the SuperPoint graph. The floating configuration gives the plain
/// reference network; otherwise each convolution gets per-channel signed
/// weight quantisation and each ReLU an unsigned activation quantiser whose
/// scale is calibrated (max-abs) on `calibration` run through the float
/// network. With no calibration images, seeded synthetic images of
/// `nominal` size are used. The input is quantised to 8 bits, scale 1/255.
graph::Graph build_graph(const SuperPointWeights& weights, const quant::BitWidthConfig& bits,
                         std::span<const nn::Tensor> calibration = {},
                         nn::Shape nominal = {1, 48, 64});

ModelOutputs run(const graph::Graph& g, const nn::Tensor& image);

}  // namespace qsp::superpoint
