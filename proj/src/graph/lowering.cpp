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

#include "qsp/graph/lowering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qsp/graph/executor.hpp"
#include "qsp/graph/passes.hpp"

namespace qsp::graph {
namespace {

constexpr double kIntLimit = 4611686018427387904.0;  // 2^62

std::int64_t ceil_to_int(double t) {
  return static_cast<std::int64_t>(std::clamp(std::ceil(t), -kIntLimit, kIntLimit));
}

int ceil_log2(std::size_t n) {
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

bool is_integer_valued(const std::vector<double>& values, double limit) {
  return std::all_of(values.begin(), values.end(), [limit](double v) {
    return std::isfinite(v) && v == std::trunc(v) && std::abs(v) <= limit;
  });
}

const std::string* owning_layer(const quant::BitWidthConfig& cfg, const std::string& node_name) {
  for (const auto& [layer, bits] : cfg.layers()) {
    if (node_name.rfind(layer + ".", 0) == 0) return &layer;
  }
  return nullptr;
}

}  // namespace

int accumulator_bits(int weight_bits, int activation_bits, std::size_t kernel,
                     std::size_t in_channels) {
  return weight_bits + activation_bits + ceil_log2(kernel * kernel * in_channels) + 1;
}

int AccumulatorBudget::max_bits() const {
  int best = 0;
  for (const auto& [name, b] : bits) best = std::max(best, b);
  return best;
}

LoweringResult lower_integer(const Graph& source, const std::optional<quant::BitWidthConfig>& cfg) {
  source.validate();
  check_streamlined(source);
  if (cfg) {
    require(!cfg->is_float(), ErrorKind::kInvalidConfig,
            "a floating-point configuration has nothing to lower");
  }
  LoweringResult result;
  Graph g = source;
  // Width of the integer value each node produces; absent means real.
  std::map<NodeId, int> domain;
  // Integer convs whose only consumer may take their bias.
  std::map<NodeId, NodeId> foldable;

  for (const auto& snapshot : std::vector<Node>(g.nodes())) {
    const NodeId id = snapshot.id;
    const auto in_domain = [&]() -> std::optional<int> {
      if (snapshot.inputs.empty()) return std::nullopt;
      const auto it = domain.find(snapshot.inputs[0]);
      if (it == domain.end()) return std::nullopt;
      return it->second;
    }();

    switch (snapshot.kind) {
      case OpKind::kQuant:
        domain[id] = std::get<QuantAttrs>(snapshot.attrs).params.bit_width;
        break;
      case OpKind::kMaxPool:
      case OpKind::kDepthToSpace:
        if (in_domain) domain[id] = *in_domain;
        break;
      case OpKind::kConv: {
        auto conv = std::get<ConvAttrs>(snapshot.attrs);
        require(!conv.weight_quant, ErrorKind::kInvalidGraph,
                "conv '" + snapshot.name + "' still carries fake-quantised weights; streamline first");
        if (cfg && !conv.layer.empty() && conv.weight_bits > 0) {
          const int expected = cfg->at(conv.layer).weight_bits;
          require(expected == conv.weight_bits, ErrorKind::kInvalidConfig,
                  "layer " + conv.layer + " was built with " + std::to_string(conv.weight_bits) +
                      "-bit weights but the configuration says " + std::to_string(expected));
        }
        if (!in_domain || conv.weight_bits == 0) break;
        const auto& weights = g.tensor(conv.weights).values;
        require(is_integer_valued(weights, 2147483647.0), ErrorKind::kInvalidGraph,
                "conv '" + snapshot.name + "' weights are not integer valued");
        const bool bias_ok = conv.bias.empty() ||
                             is_integer_valued(g.tensor(conv.bias).values, kIntLimit);
        if (!bias_ok) break;
        const int bits = accumulator_bits(conv.weight_bits, *in_domain, conv.kernel, conv.in_channels);
        if (bits > 64) {
          fail(ErrorKind::kUnsupportedWidth,
               "conv '" + snapshot.name + "' needs a " + std::to_string(bits) +
                   "-bit accumulator, more than 64");
        }
        conv.integer = true;
        conv.input_bits = *in_domain;
        conv.accumulator_bits = bits;
        g.node(id).attrs = conv;
        result.budget.bits[snapshot.name] = bits;
        domain[id] = bits;
        if (conv.bias.empty() && g.consumers(id).size() == 1) foldable[g.consumers(id).front()] = id;
        break;
      }
      case OpKind::kMultiThreshold: {
        auto mt = std::get<ThresholdAttrs>(snapshot.attrs);
        domain[id] = mt.thresholds.out_bit_width;
        if (cfg) {
          if (const auto* layer = owning_layer(*cfg, snapshot.name)) {
            const auto& bits = cfg->at(*layer);
            require(bits.activation_bits && *bits.activation_bits == mt.thresholds.out_bit_width,
                    ErrorKind::kInvalidConfig,
                    "activation width of '" + snapshot.name + "' disagrees with the configuration");
          }
        }
        if (!in_domain) break;
        auto& set = mt.thresholds;
        const auto fold = foldable.find(id);
        std::vector<std::int64_t> shift(1, 0);
        if (fold != foldable.end()) {
          const std::size_t n = std::max(mt.absorbed_scale.size(), mt.absorbed_offset.size());
          shift.assign(n, 0);
          for (std::size_t c = 0; c < n; ++c) {
            const double a = mt.absorbed_scale[mt.absorbed_scale.size() == 1 ? 0 : c];
            const double b = mt.absorbed_offset[mt.absorbed_offset.size() == 1 ? 0 : c];
            shift[c] = static_cast<std::int64_t>(quant::round_half_away(b / a));
          }
          const bool any = std::any_of(shift.begin(), shift.end(), [](auto v) { return v != 0; });
          if (any) {
            auto& conv = std::get<ConvAttrs>(g.node(fold->second).attrs);
            TensorData bias{{conv.out_channels}, std::vector<double>(conv.out_channels)};
            for (std::size_t o = 0; o < conv.out_channels; ++o) {
              bias.values[o] = static_cast<double>(shift[shift.size() == 1 ? 0 : o]);
            }
            conv.bias = g.unique_tensor_name(g.node(fold->second).name + ".bias_int");
            g.set_tensor(conv.bias, std::move(bias));
            if (shift.size() > 1 && set.rows == 1) {
              // Thresholds become channel-specific once shifted per channel.
              std::vector<double> values;
              for (std::size_t c = 0; c < shift.size(); ++c) {
                values.insert(values.end(), set.values.begin(), set.values.end());
              }
              set.values = std::move(values);
              set.rows = shift.size();
            }
          } else {
            shift.assign(1, 0);
          }
        }
        mt.integer = true;
        mt.integer_values.resize(set.values.size());
        for (std::size_t r = 0; r < set.rows; ++r) {
          const std::int64_t s = shift[shift.size() == 1 ? 0 : r];
          for (std::size_t j = 0; j < set.count; ++j) {
            const std::size_t k = r * set.count + j;
            mt.integer_values[k] = ceil_to_int(set.values[k]) + s;
          }
        }
        g.node(id).attrs = std::move(mt);
        break;
      }
      default:
        break;
    }
  }
  g.prune_tensors();
  g.validate();
  result.graph = std::move(g);
  return result;
}

double verify_equivalence(const Graph& reference, const Graph& lowered, std::size_t trials,
                          std::uint64_t seed, std::optional<nn::Shape> input_shape) {
  const nn::Shape shape =
      input_shape ? *input_shape
                  : std::get<InputAttrs>(reference.node(reference.input_node()).attrs).shape;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    nn::Tensor input(shape);
    for (double& v : input.values()) v = uniform(rng);
    const auto ref = execute_reference(reference, input);
    const auto low = execute(lowered, input);
    require(ref.size() == low.size(), ErrorKind::kInvalidGraph,
            "graphs produce different numbers of outputs");
    for (const auto& [name, expected] : ref) {
      const auto it = low.find(name);
      require(it != low.end(), ErrorKind::kInvalidGraph, "lowered graph lacks output '" + name + "'");
      require(it->second.shape() == expected.shape(), ErrorKind::kInvalidGraph,
              "output '" + name + "' shape " + nn::to_string(it->second.shape()) + " != " +
                  nn::to_string(expected.shape()));
      const auto a = expected.values();
      const auto b = it->second.values();
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
  }
  return worst;
}

Graph corrupt_threshold(Graph g, std::optional<NodeId> node) {
  if (!node) {
    for (const auto& n : g.nodes()) {
      if (n.kind == OpKind::kMultiThreshold) {
        node = n.id;
        break;
      }
    }
  }
  require(node.has_value(), ErrorKind::kInvalidGraph, "graph has no MultiThreshold to corrupt");
  auto& mt = std::get<ThresholdAttrs>(g.node(*node).attrs);
  auto& set = mt.thresholds;
  for (std::size_t r = 0; r < set.rows; ++r) {
    double* t = set.values.data() + r * set.count;
    t[0] += set.count > 1 ? t[1] - t[0] : std::max(1.0, std::abs(t[0]));
    if (mt.integer) {
      std::int64_t* q = mt.integer_values.data() + r * set.count;
      q[0] += set.count > 1 ? std::max<std::int64_t>(1, q[1] - q[0]) : 1;
      if (set.count > 1) q[0] = std::min(q[0], q[1]);
    }
  }
  return g;
}

}  // namespace qsp::graph
