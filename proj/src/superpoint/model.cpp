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

#include "qsp/superpoint/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "qsp/graph/executor.hpp"
#include "qsp/superpoint/architecture.hpp"

namespace qsp::superpoint {
namespace {

using graph::Graph;
using graph::NodeId;
using graph::OpKind;

std::string tap_name(std::string_view layer) { return std::string(layer) + ".activation"; }

// Float network; with `taps`, every ReLU output is exposed as an extra output.
Graph float_graph(const SuperPointWeights& weights, nn::Shape nominal, bool taps) {
  Graph g;
  const NodeId input = graph::add_input(g, nominal);
  std::map<std::string, NodeId> block_out;
  NodeId cur = input;
  for (const auto& spec : kLayers) {
    const std::string name(spec.name);
    if (spec.branch != Branch::kEncoder && (name == "convPa" || name == "convDa")) {
      cur = block_out.at("conv4b");
    }
    cur = graph::add_conv(g, cur, name, weights.at(name), std::nullopt, name);
    if (spec.relu) {
      cur = graph::add_simple(g, OpKind::kRelu, cur, name + ".relu");
      if (taps) graph::add_output(g, cur, tap_name(spec.name));
    }
    if (spec.pool_after) cur = graph::add_simple(g, OpKind::kMaxPool, cur, name + ".pool");
    block_out[name] = cur;
    if (name == "convPb") graph::add_output(g, cur, kLogitsOutput);
    if (name == "convDb") graph::add_output(g, cur, kDescriptorOutput);
  }
  return g;
}

std::vector<double> weight_scales(const nn::ConvSpec& conv, int bits) {
  const double qmax = std::ldexp(1.0, bits - 1) - 1.0;
  const std::size_t per_out = conv.weights.size() / conv.out_channels;
  std::vector<double> scales(conv.out_channels);
  for (std::size_t o = 0; o < conv.out_channels; ++o) {
    double m = 0;
    for (std::size_t i = 0; i < per_out; ++i) m = std::max(m, std::abs(conv.weights[o * per_out + i]));
    scales[o] = m > 0 ? m / qmax : 1.0;  // all-zero channel: any scale is exact
  }
  return scales;
}

}  // namespace

void check_image(const nn::Tensor& image) {
  require(image.channels() == 1, ErrorKind::kInvalidArgument,
          "SuperPoint expects a single-channel image, got " + nn::to_string(image.shape()));
  require(image.height() > 0 && image.width() > 0 && image.height() % kCellSize == 0 &&
              image.width() % kCellSize == 0,
          ErrorKind::kInvalidArgument,
          "image size " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
              " is not a multiple of 8");
}

std::vector<nn::Tensor> synthetic_images(std::size_t count, std::size_t height, std::size_t width,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> freq(0.05, 0.6);
  std::uniform_int_distribution<int> noise(-12, 12);
  std::vector<nn::Tensor> images;
  for (std::size_t n = 0; n < count; ++n) {
    nn::Tensor img(nn::Shape{1, height, width});
    const double fx = freq(rng), fy = freq(rng), p0 = phase(rng), p1 = phase(rng);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double v = 0.5 + 0.25 * std::sin(fx * x + p0) + 0.2 * std::cos(fy * y + p1);
        const int level = std::clamp(static_cast<int>(std::lround(v * 255)) + noise(rng), 0, 255);
        img(0, y, x) = level / 255.0;
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

Graph build_graph(const SuperPointWeights& weights, const quant::BitWidthConfig& bits,
                  std::span<const nn::Tensor> calibration, nn::Shape nominal) {
  weights.validate();
  nominal.channels = 1;
  if (bits.is_float()) return float_graph(weights, nominal, false);
  bits.validate();
  for (const auto& spec : kLayers) bits.at(std::string(spec.name));

  // Activation scales from the float network.
  std::vector<nn::Tensor> generated;
  if (calibration.empty()) {
    generated = synthetic_images(2, nominal.height, nominal.width, 0);
    calibration = generated;
  }
  const Graph probe = float_graph(weights, nominal, true);
  std::map<std::string, double> act_max;
  for (const auto& image : calibration) {
    check_image(image);
    const auto outputs = graph::execute(probe, image);
    for (const auto& spec : kLayers) {
      if (!spec.relu) continue;
      const auto& t = outputs.at(tap_name(spec.name));
      double& m = act_max[std::string(spec.name)];
      for (double v : t.values()) m = std::max(m, std::abs(v));
    }
  }

  Graph g;
  const NodeId input = graph::add_input(g, nominal);
  const auto image_q = quant::QuantParams::unsigned_tensor(8, 1.0 / 255.0);
  NodeId cur = graph::add_quant(g, input, "input.quant", image_q);
  cur = graph::add_dequant(g, cur, "input.dequant", image_q);
  std::map<std::string, NodeId> block_out;
  for (const auto& spec : kLayers) {
    const std::string name(spec.name);
    const auto& layer_bits = bits.at(name);
    if (name == "convPa" || name == "convDa") cur = block_out.at("conv4b");
    const auto& conv = weights.at(name);
    graph::WeightQuant wq{layer_bits.weight_bits, weight_scales(conv, layer_bits.weight_bits)};
    cur = graph::add_conv(g, cur, name, conv, wq, name);
    if (spec.relu) {
      const int abits = *layer_bits.activation_bits;
      const double m = act_max[name];
      const double scale = m > 0 ? m / (std::ldexp(1.0, abits) - 1.0) : 1.0;
      const auto params = quant::QuantParams::unsigned_tensor(abits, scale);
      cur = graph::add_simple(g, OpKind::kRelu, cur, name + ".relu");
      cur = graph::add_quant(g, cur, name + ".quant", params);
      cur = graph::add_dequant(g, cur, name + ".dequant", params);
    }
    if (spec.pool_after) cur = graph::add_simple(g, OpKind::kMaxPool, cur, name + ".pool");
    block_out[name] = cur;
    if (name == "convPb") graph::add_output(g, cur, kLogitsOutput);
    if (name == "convDb") graph::add_output(g, cur, kDescriptorOutput);
  }
  g.validate();
  return g;
}

ModelOutputs run(const graph::Graph& g, const nn::Tensor& image) {
  check_image(image);
  auto outputs = graph::execute(g, image);
  require(outputs.count(kLogitsOutput) && outputs.count(kDescriptorOutput), ErrorKind::kInvalidGraph,
          "graph lacks the logits/descriptors outputs");
  return {std::move(outputs.at(kLogitsOutput)), std::move(outputs.at(kDescriptorOutput))};
}

}  // namespace qsp::superpoint
