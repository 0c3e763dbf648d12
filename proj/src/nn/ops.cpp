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

#include "qsp/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "qsp/common/parallel.hpp"

namespace qsp::nn {
namespace {

template <typename Spec>
void validate_conv(const Spec& spec) {
  require(spec.in_channels > 0 && spec.out_channels > 0, ErrorKind::kInvalidArgument,
          "convolution needs positive channel counts");
  require(spec.kernel == 1 || spec.kernel == 3, ErrorKind::kInvalidArgument,
          "convolution kernel must be 1 or 3");
  const std::size_t expected =
      spec.out_channels * spec.in_channels * spec.kernel * spec.kernel;
  require(spec.weights.size() == expected, ErrorKind::kInvalidArgument,
          "convolution weight length " + std::to_string(spec.weights.size()) + " != " +
              std::to_string(expected));
  require(spec.bias.size() == spec.out_channels, ErrorKind::kInvalidArgument,
          "convolution bias length must equal out_channels");
}

// Accumulates one kernel tap for one input plane into one output plane. The
// inner x loop is contiguous in both planes.
template <typename Acc, typename In, typename W>
void accumulate_tap(std::span<Acc> out, std::span<const In> in, std::size_t height,
                    std::size_t width, W weight, std::ptrdiff_t dy, std::ptrdiff_t dx) {
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const std::ptrdiff_t y0 = std::max<std::ptrdiff_t>(0, -dy);
  const std::ptrdiff_t y1 = std::min<std::ptrdiff_t>(h, h - dy);
  const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, -dx);
  const std::ptrdiff_t x1 = std::min<std::ptrdiff_t>(w, w - dx);
  for (std::ptrdiff_t y = y0; y < y1; ++y) {
    Acc* orow = out.data() + y * w;
    const In* irow = in.data() + (y + dy) * w + dx;
    for (std::ptrdiff_t x = x0; x < x1; ++x) orow[x] += static_cast<Acc>(weight) * static_cast<Acc>(irow[x]);
  }
}

template <typename T, typename Spec>
BasicTensor<T> conv_impl(const BasicTensor<T>& input, const Spec& spec) {
  spec.validate();
  require(input.channels() == spec.in_channels, ErrorKind::kInvalidArgument,
          "conv2d input has " + std::to_string(input.channels()) + " channels, expected " +
              std::to_string(spec.in_channels));
  const Shape out_shape{spec.out_channels, input.height(), input.width()};
  BasicTensor<T> output(out_shape);
  const std::size_t k = spec.kernel;
  const auto pad = static_cast<std::ptrdiff_t>(spec.padding());
  parallel_for(spec.out_channels, [&](std::size_t o) {
    std::span<T> plane = output.channel(o);
    std::fill(plane.begin(), plane.end(), static_cast<T>(spec.bias[o]));
    for (std::size_t i = 0; i < spec.in_channels; ++i) {
      const auto in_plane = input.channel(i);
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const auto weight = spec.weights[((o * spec.in_channels + i) * k + ky) * k + kx];
          if (weight == 0) continue;
          accumulate_tap<T, T>(plane, in_plane, input.height(), input.width(), weight,
                               static_cast<std::ptrdiff_t>(ky) - pad,
                               static_cast<std::ptrdiff_t>(kx) - pad);
        }
      }
    }
  });
  return output;
}


using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Pixels per im2col block; bounds the scratch matrix to kernel^2 * C_in * 2048.
constexpr std::size_t kGemmBlock = 2048;

// im2col + GEMM over blocks of output pixels. `weights` is (C_out, C_in k k)
// row-major; bias is added once per output after the dot product.
Tensor conv_gemm(const Tensor& input, std::size_t out_channels, std::size_t kernel,
                 const RowMatrix& weights, std::span<const double> bias) {
  const std::size_t cin = input.channels();
  const std::size_t h = input.height();
  const std::size_t w = input.width();
  const std::size_t pixels = h * w;
  const std::size_t depth = cin * kernel * kernel;
  const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
  Tensor output(Shape{out_channels, h, w});
  Eigen::Map<RowMatrix> out(output.values().data(), static_cast<Eigen::Index>(out_channels),
                            static_cast<Eigen::Index>(pixels));
  const std::size_t blocks = (pixels + kGemmBlock - 1) / kGemmBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t p0 = b * kGemmBlock;
    const std::size_t n = std::min(kGemmBlock, pixels - p0);
    RowMatrix cols(static_cast<Eigen::Index>(depth), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < cin; ++c) {
      const auto plane = input.channel(c);
      for (std::size_t ky = 0; ky < kernel; ++ky) {
        for (std::size_t kx = 0; kx < kernel; ++kx) {
          double* row = cols.row(static_cast<Eigen::Index>((c * kernel + ky) * kernel + kx)).data();
          const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t p = p0 + j;
            const auto y = static_cast<std::ptrdiff_t>(p / w) + dy;
            const auto x = static_cast<std::ptrdiff_t>(p % w) + dx;
            row[j] = (y < 0 || x < 0 || y >= static_cast<std::ptrdiff_t>(h) ||
                      x >= static_cast<std::ptrdiff_t>(w))
                         ? 0.0
                         : plane[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)];
          }
        }
      }
    }
    auto block = out.middleCols(static_cast<Eigen::Index>(p0), static_cast<Eigen::Index>(n));
    block.noalias() = weights * cols;
    for (std::size_t o = 0; o < out_channels; ++o) {
      if (bias[o] != 0) block.row(static_cast<Eigen::Index>(o)).array() += bias[o];
    }
  });
  return output;
}

RowMatrix weight_matrix(std::size_t out_channels, std::size_t depth, const auto& weights) {
  RowMatrix m(static_cast<Eigen::Index>(out_channels), static_cast<Eigen::Index>(depth));
  for (std::size_t i = 0; i < weights.size(); ++i) m.data()[i] = static_cast<double>(weights[i]);
  return m;
}

}  // namespace

Tensor conv2d(const Tensor& input, const ConvSpec& spec) {
  spec.validate();
  require(input.channels() == spec.in_channels, ErrorKind::kInvalidArgument,
          "conv2d input has " + std::to_string(input.channels()) + " channels, expected " +
              std::to_string(spec.in_channels));
  const std::size_t depth = spec.in_channels * spec.kernel * spec.kernel;
  return conv_gemm(input, spec.out_channels, spec.kernel,
                   weight_matrix(spec.out_channels, depth, spec.weights), spec.bias);
}

// Integer convolution. When every partial sum is bounded by 2^53 the double
// GEMM is exact; otherwise the direct int64 loop runs.
IntTensor conv2d(const IntTensor& input, const IntConvSpec& spec) {
  spec.validate();
  require(input.channels() == spec.in_channels, ErrorKind::kInvalidArgument,
          "conv2d input has " + std::to_string(input.channels()) + " channels, expected " +
              std::to_string(spec.in_channels));
  const std::size_t depth = spec.in_channels * spec.kernel * spec.kernel;
  double max_w = 0, max_x = 0, max_b = 0;
  for (auto v : spec.weights) max_w = std::max(max_w, std::abs(static_cast<double>(v)));
  for (auto v : input.values()) max_x = std::max(max_x, std::abs(static_cast<double>(v)));
  for (auto v : spec.bias) max_b = std::max(max_b, std::abs(static_cast<double>(v)));
  const double bound = max_w * max_x * static_cast<double>(depth) + max_b;
  if (!(bound < 0x1p52)) return conv_impl(input, spec);
  Tensor real(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) real.values()[i] = static_cast<double>(input.values()[i]);
  std::vector<double> bias(spec.bias.begin(), spec.bias.end());
  const Tensor y = conv_gemm(real, spec.out_channels, spec.kernel,
                             weight_matrix(spec.out_channels, depth, spec.weights), bias);
  IntTensor out(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) out.values()[i] = static_cast<std::int64_t>(y.values()[i]);
  return out;
}

namespace {

template <typename T>
BasicTensor<T> maxpool_impl(const BasicTensor<T>& input) {
  require(input.height() % 2 == 0 && input.width() % 2 == 0, ErrorKind::kInvalidArgument,
          "maxpool2x2 needs even height and width, got " + to_string(input.shape()));
  BasicTensor<T> output(Shape{input.channels(), input.height() / 2, input.width() / 2});
  for (std::size_t c = 0; c < output.channels(); ++c) {
    for (std::size_t y = 0; y < output.height(); ++y) {
      for (std::size_t x = 0; x < output.width(); ++x) {
        output(c, y, x) = std::max({input(c, 2 * y, 2 * x), input(c, 2 * y, 2 * x + 1),
                                    input(c, 2 * y + 1, 2 * x), input(c, 2 * y + 1, 2 * x + 1)});
      }
    }
  }
  return output;
}

template <typename T>
BasicTensor<T> depth_to_space_impl(const BasicTensor<T>& input, std::size_t block) {
  require(block > 0, ErrorKind::kInvalidArgument, "depth_to_space block must be positive");
  const std::size_t cells = block * block;
  require(input.channels() % cells == 0, ErrorKind::kInvalidArgument,
          "depth_to_space: " + std::to_string(input.channels()) +
              " channels not divisible by block^2 = " + std::to_string(cells));
  const std::size_t out_channels = input.channels() / cells;
  BasicTensor<T> output(Shape{out_channels, input.height() * block, input.width() * block});
  for (std::size_t c = 0; c < out_channels; ++c) {
    for (std::size_t k = 0; k < cells; ++k) {
      const std::size_t oy = k / block;
      const std::size_t ox = k % block;
      for (std::size_t i = 0; i < input.height(); ++i) {
        for (std::size_t j = 0; j < input.width(); ++j) {
          output(c, i * block + oy, j * block + ox) = input(c * cells + k, i, j);
        }
      }
    }
  }
  return output;
}

double round_half_away(double v) { return std::round(v); }

}  // namespace

void ConvSpec::validate() const { validate_conv(*this); }
void IntConvSpec::validate() const { validate_conv(*this); }


Tensor maxpool2x2(const Tensor& input) { return maxpool_impl(input); }
IntTensor maxpool2x2(const IntTensor& input) { return maxpool_impl(input); }

Tensor relu(const Tensor& input) {
  Tensor output = input;
  for (double& v : output.values()) v = std::max(v, 0.0);
  return output;
}

Tensor softmax_channels(const Tensor& input, SoftmaxMode mode) {
  require(input.channels() >= 1, ErrorKind::kInvalidArgument, "softmax needs at least one channel");
  Tensor output(input.shape());
  const std::size_t channels = input.channels();
  const std::size_t plane = input.shape().plane();
  std::vector<double> site(channels);
  // Fixed-point mode: logits relative to the site maximum are held as signed
  // `bits`-wide integers with 4 fractional bits; probabilities leave as
  // unsigned `bits`-wide integers with scale 1 / (2^bits - 1).
  const double in_scale = 1.0 / 16.0;
  const double in_min = -std::ldexp(1.0, mode.bits - 1);
  const double in_max = std::ldexp(1.0, mode.bits - 1) - 1.0;
  const double out_levels = std::ldexp(1.0, mode.bits) - 1.0;
  for (std::size_t p = 0; p < plane; ++p) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < channels; ++c) {
      site[c] = input.values()[c * plane + p];
      peak = std::max(peak, site[c]);
    }
    double total = 0.0;
    if (mode.variant == SoftmaxMode::Variant::kFloatE) {
      for (double& v : site) {
        v = std::exp(v - peak);
        total += v;
      }
      for (std::size_t c = 0; c < channels; ++c) output.values()[c * plane + p] = site[c] / total;
      continue;
    }
    for (double& v : site) {
      const double q = std::clamp(round_half_away((v - peak) / in_scale), in_min, in_max);
      v = std::exp2(q * in_scale);
      total += v;
    }
    double level_sum = 0.0;
    for (double& v : site) {
      v = std::clamp(round_half_away(v / total * out_levels), 0.0, out_levels);
      level_sum += v;
    }
    for (std::size_t c = 0; c < channels; ++c) {
      output.values()[c * plane + p] =
          level_sum > 0 ? site[c] / level_sum : 1.0 / static_cast<double>(channels);
    }
  }
  return output;
}

Tensor depth_to_space(const Tensor& input, std::size_t block) {
  return depth_to_space_impl(input, block);
}
IntTensor depth_to_space(const IntTensor& input, std::size_t block) {
  return depth_to_space_impl(input, block);
}

std::vector<double> bilinear_sample(const Tensor& map, double x, double y) {
  require(!map.empty(), ErrorKind::kInvalidArgument, "bilinear_sample on an empty map");
  const double max_x = static_cast<double>(map.width() - 1);
  const double max_y = static_cast<double>(map.height() - 1);
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const std::size_t x1 = std::min(x0 + 1, map.width() - 1);
  const std::size_t y1 = std::min(y0 + 1, map.height() - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  std::vector<double> out(map.channels());
  for (std::size_t c = 0; c < map.channels(); ++c) {
    const double top = map(c, y0, x0) * (1.0 - fx) + map(c, y0, x1) * fx;
    const double bottom = map(c, y1, x0) * (1.0 - fx) + map(c, y1, x1) * fx;
    out[c] = top * (1.0 - fy) + bottom * fy;
  }
  return out;
}

Tensor upsample_bilinear(const Tensor& map, std::size_t factor) {
  require(factor > 0, ErrorKind::kInvalidArgument, "upsample factor must be positive");
  Tensor output(Shape{map.channels(), map.height() * factor, map.width() * factor});
  const double f = static_cast<double>(factor);
  for (std::size_t y = 0; y < output.height(); ++y) {
    for (std::size_t x = 0; x < output.width(); ++x) {
      const auto v = bilinear_sample(map, (static_cast<double>(x) + 0.5) / f - 0.5,
                                     (static_cast<double>(y) + 0.5) / f - 0.5);
      for (std::size_t c = 0; c < map.channels(); ++c) output(c, y, x) = v[c];
    }
  }
  return output;
}

Tensor l2_normalize_channels(const Tensor& input, double eps) {
  require(eps > 0, ErrorKind::kInvalidArgument, "l2 normalisation eps must be positive");
  Tensor output = input;
  const std::size_t plane = input.shape().plane();
  for (std::size_t p = 0; p < plane; ++p) {
    double sq = 0.0;
    for (std::size_t c = 0; c < input.channels(); ++c) {
      const double v = input.values()[c * plane + p];
      sq += v * v;
    }
    const double denom = std::max(std::sqrt(sq), eps);
    for (std::size_t c = 0; c < input.channels(); ++c) output.values()[c * plane + p] /= denom;
  }
  return output;
}

}  // namespace qsp::nn
