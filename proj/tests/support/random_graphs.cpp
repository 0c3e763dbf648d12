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

#include "random_graphs.hpp"

#include <algorithm>
#include <cmath>

namespace qsp::testing {

using graph::OpKind;

graph::Graph random_quant_graph(std::mt19937_64& rng, const RandomGraphOptions& options) {
  std::uniform_int_distribution<int> pick(0, 1 << 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto range = [&](int lo, int hi) { return lo + pick(rng) % (hi - lo + 1); };

  const auto channels = static_cast<std::size_t>(range(1, 3));
  const std::size_t size = range(0, 1) ? 8 : 4;
  graph::Graph g;
  const graph::NodeId in = graph::add_input(g, {channels, size, size});
  const auto in_q = quant::QuantParams::unsigned_tensor(8, 1.0 / 255.0);
  graph::NodeId cur = graph::add_quant(g, in, "in.quant", in_q);
  cur = graph::add_dequant(g, cur, "in.dequant", in_q);

  std::size_t c = channels, h = size;
  const int depth = range(1, options.max_depth);
  for (int l = 0; l < depth; ++l) {
    const std::string name = "l" + std::to_string(l);
    nn::ConvSpec spec;
    spec.in_channels = c;
    spec.out_channels = static_cast<std::size_t>(range(1, 4));
    spec.kernel = range(0, 1) ? 3 : 1;
    spec.weights.resize(spec.out_channels * c * spec.kernel * spec.kernel);
    for (double& w : spec.weights) w = normal(rng) * 0.5;
    spec.bias.resize(spec.out_channels);
    for (double& b : spec.bias) b = normal(rng) * 0.1;
    std::optional<graph::WeightQuant> wq;
    if (!options.allow_float_conv || range(0, 3) != 0) {
      const int bits = range(2, 8);
      std::vector<double> scales(spec.out_channels);
      const std::size_t per = c * spec.kernel * spec.kernel;
      for (std::size_t o = 0; o < spec.out_channels; ++o) {
        double m = 0;
        for (std::size_t i = 0; i < per; ++i) m = std::max(m, std::abs(spec.weights[o * per + i]));
        scales[o] = m / (std::ldexp(1.0, bits - 1) - 1);
      }
      wq = graph::WeightQuant{bits, scales};
    }
    cur = graph::add_conv(g, cur, name, spec, wq, name);
    if (options.allow_affines && range(0, 2) == 0) {
      std::vector<double> a(spec.out_channels), b(spec.out_channels);
      for (auto& v : a) v = 0.25 + 2 * u(rng);
      for (auto& v : b) v = normal(rng) * 0.2;
      cur = graph::add_affine(g, cur, name + ".affine", a, b);
    }
    const int abits = range(2, 8);
    const double scale = (0.05 + u(rng)) / (std::ldexp(1.0, abits) - 1);
    const auto params = quant::QuantParams::unsigned_tensor(abits, scale);
    cur = graph::add_simple(g, OpKind::kRelu, cur, name + ".relu");
    cur = graph::add_quant(g, cur, name + ".quant", params);
    if (l == depth - 1 && range(0, 1) == 0) {
      graph::add_output(g, cur, "out");  // integer levels
      g.validate();
      return g;
    }
    cur = graph::add_dequant(g, cur, name + ".dequant", params);
    c = spec.out_channels;
    if (options.allow_pool && h % 2 == 0 && h > 2 && range(0, 2) == 0) {
      cur = graph::add_simple(g, OpKind::kMaxPool, cur, name + ".pool");
      h /= 2;
    }
  }
  graph::add_output(g, cur, "out");
  g.validate();
  return g;
}

nn::Tensor random_input(const graph::Graph& g, std::mt19937_64& rng) {
  const auto& shape = std::get<graph::InputAttrs>(g.node(g.input_node()).attrs).shape;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nn::Tensor x(shape);
  for (double& v : x.values()) v = u(rng);
  return x;
}

}  // namespace qsp::testing
