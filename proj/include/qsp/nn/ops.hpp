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
#include <vector>

#include "qsp/nn/tensor.hpp"

namespace qsp::nn {

/// Stride-1 convolution with "same" zero padding. Weights are laid out
/// (out, in, k, k).
struct ConvSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::vector<double> weights;
  std::vector<double> bias;

  std::size_t padding() const { return kernel / 2; }
  void validate() const;
};

/// Integer twin of ConvSpec used by lowered graphs.
struct IntConvSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::vector<std::int32_t> weights;
  std::vector<std::int64_t> bias;

  std::size_t padding() const { return kernel / 2; }
  void validate() const;
};

struct SoftmaxMode {
  enum class Variant { kFloatE, kFixedBase2 };
  Variant variant = Variant::kFloatE;
  int bits = 8;  // FIXED_BASE2 input and output width

  static SoftmaxMode float_e() { return {}; }
  static SoftmaxMode fixed_base2() { return {Variant::kFixedBase2, 8}; }
};

Tensor conv2d(const Tensor& input, const ConvSpec& spec);
IntTensor conv2d(const IntTensor& input, const IntConvSpec& spec);

/// 2x2 window, stride 2. Odd spatial sizes are rejected.
Tensor maxpool2x2(const Tensor& input);
IntTensor maxpool2x2(const IntTensor& input);

Tensor relu(const Tensor& input);

/// Softmax across channels at every (h, w) site.
Tensor softmax_channels(const Tensor& input, SoftmaxMode mode = SoftmaxMode::float_e());

/// Channel c' * block^2 + k at cell (i, j) moves to channel c', pixel
/// (i * block + k / block, j * block + k % block).
Tensor depth_to_space(const Tensor& input, std::size_t block);
IntTensor depth_to_space(const IntTensor& input, std::size_t block);

/// Bilinear blend of the 4 neighbours per channel; coordinates are clamped to
/// [0, W-1] x [0, H-1].
std::vector<double> bilinear_sample(const Tensor& map, double x, double y);

/// Upsamples by an integer factor with centre-aligned sampling: output pixel
/// (x, y) reads the map at ((x + 0.5) / factor - 0.5, (y + 0.5) / factor - 0.5).
Tensor upsample_bilinear(const Tensor& map, std::size_t factor);

/// Divides each site's channel vector by max(||v||_2, eps).
Tensor l2_normalize_channels(const Tensor& input, double eps = 1e-12);

}  // namespace qsp::nn
