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

#include "qsp/quant/quant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsp::quant {

std::int64_t QuantParams::qmin() const {
  return is_signed ? -(std::int64_t{1} << (bit_width - 1)) : 0;
}

std::int64_t QuantParams::qmax() const {
  return is_signed ? (std::int64_t{1} << (bit_width - 1)) - 1 : (std::int64_t{1} << bit_width) - 1;
}

double QuantParams::scale_for(std::size_t channel) const {
  if (const auto* t = std::get_if<PerTensor>(&scale)) return t->scale;
  const auto& scales = std::get<PerChannel>(scale).scales;
  require(channel < scales.size(), ErrorKind::kInvalidArgument,
          "channel " + std::to_string(channel) + " has no quantisation scale");
  return scales[channel];
}

std::size_t QuantParams::scale_count() const {
  if (std::holds_alternative<PerTensor>(scale)) return 1;
  return std::get<PerChannel>(scale).scales.size();
}

void QuantParams::validate() const {
  require(bit_width >= 1 && bit_width <= 8, ErrorKind::kInvalidArgument,
          "bit width " + std::to_string(bit_width) + " outside [1, 8]");
  require(!(is_signed && bit_width < 2), ErrorKind::kInvalidArgument,
          "signed quantisation needs at least 2 bits");
  auto check = [](double s) {
    require(std::isfinite(s) && s > 0, ErrorKind::kInvalidArgument,
            "quantisation scales must be finite and positive");
  };
  if (const auto* t = std::get_if<PerTensor>(&scale)) {
    check(t->scale);
  } else {
    const auto& scales = std::get<PerChannel>(scale).scales;
    require(!scales.empty(), ErrorKind::kInvalidArgument, "per-channel layout without scales");
    std::for_each(scales.begin(), scales.end(), check);
  }
}

double round_half_away(double value) { return std::round(value); }

std::int64_t quantize_value(double x, double scale, std::int64_t qmin, std::int64_t qmax) {
  const double q = round_half_away(x / scale);
  if (q <= static_cast<double>(qmin)) return qmin;
  if (q >= static_cast<double>(qmax)) return qmax;
  return static_cast<std::int64_t>(q);
}

QuantTensor quantize(const nn::Tensor& x, const QuantParams& params) {
  params.validate();
  nn::require_finite(x, "quantize input");
  if (params.per_channel()) {
    require(params.scale_count() == x.channels(), ErrorKind::kInvalidArgument,
            "per-channel scale count " + std::to_string(params.scale_count()) +
                " != channel count " + std::to_string(x.channels()));
  }
  nn::IntTensor values(x.shape());
  const std::int64_t lo = params.qmin();
  const std::int64_t hi = params.qmax();
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const double s = params.scale_for(c);
    const auto in = x.channel(c);
    auto out = values.channel(c);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = quantize_value(in[i], s, lo, hi);
  }
  return {std::move(values), params};
}

nn::Tensor dequantize(const QuantTensor& q) {
  nn::Tensor out(q.values.shape());
  for (std::size_t c = 0; c < out.channels(); ++c) {
    const double s = q.params.scale_for(c);
    const auto in = q.values.channel(c);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < in.size(); ++i) dst[i] = static_cast<double>(in[i]) * s;
  }
  return out;
}

QuantParams calibrate(std::span<const nn::Tensor> samples, int bit_width, bool is_signed,
                      Granularity layout) {
  require(!samples.empty(), ErrorKind::kInvalidArgument, "calibration needs at least one sample");
  const std::size_t channels = samples.front().channels();
  std::vector<double> max_abs(layout == Granularity::kPerChannel ? channels : 1, 0.0);
  for (const auto& sample : samples) {
    nn::require_finite(sample, "calibration sample");
    require(sample.channels() == channels, ErrorKind::kInvalidArgument,
            "calibration samples disagree on channel count");
    for (std::size_t c = 0; c < channels; ++c) {
      double& slot = max_abs[layout == Granularity::kPerChannel ? c : 0];
      for (double v : sample.channel(c)) slot = std::max(slot, std::abs(v));
    }
  }
  const double magnitude = is_signed ? std::ldexp(1.0, bit_width - 1) - 1.0
                                     : std::ldexp(1.0, bit_width) - 1.0;
  std::vector<double> scales;
  scales.reserve(max_abs.size());
  for (std::size_t g = 0; g < max_abs.size(); ++g) {
    require(max_abs[g] > 0, ErrorKind::kInvalidArgument,
            "calibration group " + std::to_string(g) + " is all zero");
    scales.push_back(max_abs[g] / magnitude);
  }
  QuantParams params{bit_width, is_signed, PerTensor{}};
  if (layout == Granularity::kPerChannel) {
    params.scale = PerChannel{std::move(scales)};
  } else {
    params.scale = PerTensor{scales.front()};
  }
  params.validate();
  return params;
}

std::int64_t accumulator_bias(double bias, double weight_scale, double activation_scale) {
  const double step = weight_scale * activation_scale;
  require(step > 0, ErrorKind::kInvalidArgument, "accumulator scale must be positive");
  return static_cast<std::int64_t>(round_half_away(bias / step));
}

}  // namespace qsp::quant
