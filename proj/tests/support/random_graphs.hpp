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
#include <random>

#include "qsp/graph/ir.hpp"

namespace qsp::testing {

struct RandomGraphOptions {
  int max_depth = 6;
  bool allow_float_conv = false;  // some convs without a weight quantiser
  bool allow_affines = true;      // positive Affine between Conv and Relu
  bool allow_pool = true;
};

/// Input -> Quant/Dequant -> up to `max_depth` layers of
/// Conv -> [Affine] -> Relu -> Quant -> Dequant -> [MaxPool], ending in the
/// last Quant (integer levels) or Dequant. Input shape is recorded on the
/// Input node.
graph::Graph random_quant_graph(std::mt19937_64& rng, const RandomGraphOptions& options = {});

/// Uniform [0, 1) input matching the graph's Input node.
nn::Tensor random_input(const graph::Graph& g, std::mt19937_64& rng);

}  // namespace qsp::testing
