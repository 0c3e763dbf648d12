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
#include <variant>
#include <vector>

#include "qsp/nn/tensor.hpp"

namespace qsp::quant {

struct PerTensor {
  double scale = 1.0;
  bool operator==(const PerTensor&) const = default;
};

struct PerChannel {
  std::vector<double> scales;
  bool operator==(const PerChannel&) const = default;
};

using ScaleLayout = std::variant<PerTensor, PerChannel>;

enum class Granularity { kPerTensor, kPerChannel };

/// Uniform quantiser with the zero-point pinned to 0: x ~= q * s.
struct QuantParams {
  int bit_width = 8;
  bool is_signed = false;
  ScaleLayout scale = PerTensor{};

  static QuantParams unsigned_tensor(int bits, double scale) { return {bits, false, PerTensor{scale}}; }
  static QuantParams signed_tensor(int bits, double scale) { return {bits, true, PerTensor{scale}}; }
  static QuantParams signed_channels(int bits, std::vector<double> scales) {
    return {bits, true, PerChannel{std::move(scales)}};
  }

  std::int64_t qmin() const;
  std::int64_t qmax() const;
  /// Scale applying to channel c (the single scale for per-tensor layouts).
  double scale_for(std::size_t channel) const;
  bool per_channel() const { return std::holds_alternative<PerChannel>(scale); }
  std::size_t scale_count() const;
  void validate() const;

  bool operator==(const QuantParams&) const = default;
};

struct QuantTensor {
  nn::IntTensor values;
  QuantParams params;
};

/// Round half away from zero.
double round_half_away(double value);

/// Scalar form of quantize for one value with a resolved scale.
std::int64_t quantize_value(double x, double scale, std::int64_t qmin, std::int64_t qmax);

QuantTensor quantize(const nn::Tensor& x, const QuantParams& params);
nn::Tensor dequantize(const QuantTensor& q);

/// Max-abs calibration over all samples. Per-channel groups run over the
/// channel axis; every group needs a non-zero entry.
QuantParams calibrate(std::span<const nn::Tensor> samples, int bit_width, bool is_signed,
                      Granularity layout);

/// Bias expressed in accumulator units: round(b / (s_w * s_a)).
std::int64_t accumulator_bias(double bias, double weight_scale, double activation_scale);

}  // namespace qsp::quant
