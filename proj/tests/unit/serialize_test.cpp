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

#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "random_graphs.hpp"
#include "qsp/graph/executor.hpp"
#include "qsp/graph/lowering.hpp"
#include "qsp/graph/passes.hpp"
#include "qsp/graph/serialize.hpp"

namespace qsp::graph {
namespace {

namespace fs = std::filesystem;

ErrorKind load_error(const fs::path& path) {
  try {
    load_graph(path);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "load succeeded";
  return ErrorKind::kInvalidArgument;
}

TEST(Serialize, RoundTripsRandomGraphs) {
  const fs::path dir = testing::temp_dir("serialize_rt");
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    const Graph g = testing::random_quant_graph(rng);
    const fs::path path = dir / ("g" + std::to_string(t) + ".json");
    save_graph(g, path);
    const Graph back = load_graph(path);
    EXPECT_EQ(graph_to_json(back), graph_to_json(g));
    EXPECT_EQ(back.tensors(), g.tensors());
    const nn::Tensor x = testing::random_input(g, rng);
    EXPECT_EQ(execute(back, x).at("out"), execute(g, x).at("out"));
  }
}

TEST(Serialize, RoundTripsLoweredGraphs) {
  const fs::path dir = testing::temp_dir("serialize_lowered");
  std::mt19937_64 rng(32);
  for (int t = 0; t < 5; ++t) {
    const Graph low = lower_integer(streamline(testing::random_quant_graph(rng)).graph).graph;
    save_graph(low, dir / "low.json");
    const Graph back = load_graph(dir / "low.json");
    EXPECT_EQ(back.census(), low.census());
    EXPECT_EQ(back.tensors(), low.tensors());
    EXPECT_EQ(verify_equivalence(low, back, 3, 1), 0.0);
    // Loading renumbers node ids densely; after that the document is stable.
    save_graph(back, dir / "again.json");
    EXPECT_EQ(graph_to_json(load_graph(dir / "again.json")), graph_to_json(back));
  }
}

TEST(Serialize, RejectsUnknownVersion) {
  const fs::path dir = testing::temp_dir("serialize_version");
  Graph g;
  add_output(g, add_input(g, {1, 1, 1}), "y");
  std::string text = graph_to_json(g);
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos) << text;
  text.replace(pos, 12, "\"version\": 99");
  testing::write_file(dir / "g.json", text);
  EXPECT_EQ(load_error(dir / "g.json"), ErrorKind::kParseError);
}

TEST(Serialize, RejectsMalformedJson) {
  const fs::path dir = testing::temp_dir("serialize_bad");
  testing::write_file(dir / "g.json", "{\"format\": ");
  EXPECT_EQ(load_error(dir / "g.json"), ErrorKind::kParseError);
  testing::write_file(dir / "h.json", "{\"format\": \"other\", \"version\": 1}");
  EXPECT_EQ(load_error(dir / "h.json"), ErrorKind::kParseError);
}

TEST(Serialize, RejectsDanglingInput) {
  const fs::path dir = testing::temp_dir("serialize_dangling");
  testing::write_file(dir / "g.json",
                      R"({"format": "qsp-graph", "version": 1, "nodes": [)"
                      R"({"id": 0, "kind": "Output", "name": "y", "inputs": [7],)"
                      R"( "attrs": {"name": "y"}}]})");
  EXPECT_EQ(load_error(dir / "g.json"), ErrorKind::kInvalidGraph);
}

TEST(Serialize, MissingFileIsIoError) {
  EXPECT_EQ(load_error(testing::temp_dir("serialize_missing") / "none.json"), ErrorKind::kIoError);
}

}  // namespace
}  // namespace qsp::graph
