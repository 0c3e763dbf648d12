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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qsp/graph/ir.hpp"

namespace qsp::graph {

struct PassReport {
  std::string pass;
  int round = 0;  // 0 for canonicalisation, fixpoint rounds count from 1
  std::size_t rewritten = 0;
  std::map<std::string, std::size_t> remaining;  // node census after the pass
};

struct StreamlineResult {
  Graph graph;
  std::vector<PassReport> reports;  // only passes that rewrote something
  /// Affine node count after canonicalisation, then after every round.
  std::vector<std::size_t> affine_counts;
};

using PassObserver = std::function<void(const PassReport&, const Graph&)>;

/// Clones Affine/Dequant nodes with several consumers, turns Dequant into
/// Affine(s, 0) and splits fake-quantised convolutions into an integer-valued
/// Conv followed by Affine(s_w, bias).
std::size_t canonicalize(Graph& g);
/// Affine(a2, b2) after Affine(a1, b1) becomes Affine(a2 a1, a2 b1 + b2).
std::size_t fuse_affines(Graph& g);
/// Pushes Affine nodes below Conv (uniform scale, zero offset), MaxPool
/// (positive scale), DepthToSpace and Resize, as far as they will go.
std::size_t move_affines(Graph& g);
/// Relu followed by an unsigned Quant becomes one MultiThreshold.
std::size_t quant_to_multithreshold(Graph& g);
/// Folds an Affine feeding a MultiThreshold into its thresholds.
std::size_t absorb_into_thresholds(Graph& g);

/// Throws unsupported-transform naming the first Affine that still reaches a
/// MultiThreshold.
void check_streamlined(const Graph& g);

/// Canonicalises, then runs move / threshold conversion / absorption / fusion
/// rounds until nothing changes.
StreamlineResult streamline(Graph g, const PassObserver& observer = {});

}  // namespace qsp::graph
