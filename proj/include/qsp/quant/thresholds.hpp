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

#include "qsp/nn/tensor.hpp"
#include "qsp/quant/quant.hpp"

namespace qsp::quant {

/// Per-channel ascending thresholds realising an unsigned quantised
/// activation. A single row is broadcast to every channel.
struct ThresholdSet {
  std::size_t rows = 0;
  std::size_t count = 0;  // thresholds per row
  std::vector<double> values;  // rows x count, row-major
  int out_bit_width = 8;
  double out_scale = 1.0;  // scale of the emitted levels, used by Dequant

  std::span<const double> row(std::size_t channel) const;
  std::span<double> row(std::size_t channel);
  /// Throws invalid-argument on shape mismatch, non-finite entries or a
  /// decreasing row.
  void validate() const;

  bool operator==(const ThresholdSet&) const = default;
};

/// Thresholds t_j = s * (j - 0.5), j = 1 .. 2^b - 1, so that counting crossed
/// thresholds reproduces quantize(relu(x)) under round-half-away-from-zero.
ThresholdSet quant_to_thresholds(const QuantParams& act_params);

/// Number of thresholds in the row that are <= x.
std::int64_t threshold_level(std::span<const double> row, double x);

QuantTensor apply_thresholds(const nn::Tensor& x, const ThresholdSet& thresholds);

/// Rewrites thresholds so that thresholding x equals thresholding a * x + b
/// with the original set: t <- (t - b) / a, snapped to the exact floating-point
/// boundary of x -> a * x + b. Every a must be positive.
ThresholdSet absorb_affine(const ThresholdSet& thresholds, std::span<const double> a,
                           std::span<const double> b);

}  // namespace qsp::quant
