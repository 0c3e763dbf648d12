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
#include <map>
#include <optional>
#include <string>

#include "qsp/graph/ir.hpp"
#include "qsp/quant/bitwidth.hpp"

namespace qsp::graph {

/// w_bits + a_bits + ceil(log2(k * k * c_in)) + 1.
int accumulator_bits(int weight_bits, int activation_bits, std::size_t kernel,
                     std::size_t in_channels);

/// Proven accumulator width per integer Conv node, keyed by node name.
struct AccumulatorBudget {
  std::map<std::string, int> bits;

  int max_bits() const;
};

struct LoweringResult {
  Graph graph;
  AccumulatorBudget budget;
};

/// Turns a streamlined graph into integer-only execution: every Conv fed by
/// integer levels runs with int32 weights and an int64 accumulator, and every
/// MultiThreshold on an accumulator compares against integer thresholds. The
/// bias implied by the absorbed affine, round(b / (s_w s_a)), moves into the
/// conv and the thresholds are shifted by the same amount. When `cfg` is
/// given, per-layer widths recorded in the graph are checked against it.
LoweringResult lower_integer(const Graph& g,
                             const std::optional<quant::BitWidthConfig>& cfg = std::nullopt);

/// Runs both graphs on `trials` uniform [0, 1) inputs and returns the largest
/// absolute output difference. The input shape defaults to the shape recorded
/// on the reference graph's Input node.
double verify_equivalence(const Graph& reference, const Graph& lowered, std::size_t trials,
                          std::uint64_t seed, std::optional<nn::Shape> input_shape = std::nullopt);

/// Mutation helper: raises the first threshold of every row of a
/// MultiThreshold (the first one when `node` is empty) by one step.
Graph corrupt_threshold(Graph g, std::optional<NodeId> node = std::nullopt);

}  // namespace qsp::graph
