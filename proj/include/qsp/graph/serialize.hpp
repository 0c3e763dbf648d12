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

#include <filesystem>
#include <string>
#include <vector>

#include "qsp/graph/ir.hpp"
#include "qsp/graph/passes.hpp"

namespace qsp::graph {

inline constexpr int kGraphFormatVersion = 1;

/// Versioned JSON document of nodes and attributes. Tensors are referenced by
/// name; `tensor_archive` (a directory relative to the document) is recorded
/// when the tensors are stored alongside.
std::string graph_to_json(const Graph& g, const std::string& tensor_archive = {});

/// Writes `<path>` and the tensor archive `<path stem>.tensors/` next to it.
void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

std::string reports_to_json(const std::vector<PassReport>& reports);

}  // namespace qsp::graph
