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

#include <map>
#include <string>
#include <variant>

#include "qsp/graph/ir.hpp"
#include "qsp/nn/tensor.hpp"

namespace qsp::graph {

/// Runtime value on an edge: real maps, or integer levels / accumulators.
using Value = std::variant<nn::Tensor, nn::IntTensor>;

/// Graph outputs keyed by Output node name.
using OutputMap = std::map<std::string, nn::Tensor>;

/// Executes the graph in node order. Quant and MultiThreshold emit integer
/// levels, Dequant and Affine return to reals, and integer Conv nodes run in
/// int64. Outputs are returned as reals. All scratch state is local to the
/// call, so a graph may be executed from several threads at once.
OutputMap execute(const Graph& g, const nn::Tensor& input);

/// Fake-quantised real-arithmetic oracle. Identical to execute() on graphs
/// without integer nodes; kept as a separate entry point for readability at
/// call sites that compare against lowered graphs.
OutputMap execute_reference(const Graph& g, const nn::Tensor& input);

}  // namespace qsp::graph
