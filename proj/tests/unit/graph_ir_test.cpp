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

#include <gtest/gtest.h>

#include "qsp/graph/executor.hpp"
#include "qsp/graph/ir.hpp"

namespace qsp::graph {
namespace {

nn::Tensor row(std::vector<double> v) {
  const std::size_t n = v.size();
  return nn::Tensor({1, 1, n}, std::move(v));
}

TEST(Execute, InputToOutputIsIdentity) {
  Graph g;
  add_output(g, add_input(g, {1, 1, 3}), "y");
  const auto x = row({1.5, -2, 0});
  EXPECT_EQ(execute_reference(g, x).at("y"), x);
}

TEST(Execute, Relu) {
  Graph g;
  add_output(g, add_simple(g, OpKind::kRelu, add_input(g, {1, 1, 2}), "relu"), "y");
  EXPECT_EQ(execute_reference(g, row({-1, 2})).at("y").data(), (std::vector<double>{0, 2}));
}

TEST(Execute, QuantDequantRoundTrip) {
  Graph g;
  const auto p = quant::QuantParams::unsigned_tensor(8, 1.0);
  NodeId n = add_quant(g, add_input(g, {1, 1, 1}), "q", p);
  add_output(g, add_dequant(g, n, "dq", p), "y");
  EXPECT_EQ(execute_reference(g, row({0.4})).at("y").values()[0], 0.0);
}

TEST(Execute, QuantOutputsAreLevels) {
  Graph g;
  add_output(g, add_quant(g, add_input(g, {1, 1, 2}), "q", quant::QuantParams::unsigned_tensor(4, 0.5)), "y");
  EXPECT_EQ(execute(g, row({1.26, 100})).at("y").data(), (std::vector<double>{3, 15}));
}

TEST(Graph, RejectsDanglingEdges) {
  Graph g;
  const NodeId in = add_input(g, {1, 1, 1});
  const NodeId r = add_simple(g, OpKind::kRelu, in, "relu");
  add_output(g, r, "y");
  g.node(r).inputs = {99};
  try {
    g.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidGraph);
  }
}

TEST(Graph, RejectsOutOfOrderNodes) {
  Graph g;
  const NodeId in = add_input(g, {1, 1, 1});
  const NodeId a = add_simple(g, OpKind::kRelu, in, "a");
  const NodeId b = add_simple(g, OpKind::kRelu, a, "b");
  add_output(g, b, "y");
  g.node(a).inputs = {b};  // cycle a <-> b
  EXPECT_THROW(g.validate(), Error);
}

TEST(Graph, RejectsMissingTensor) {
  Graph g;
  const NodeId in = add_input(g, {1, 2, 2});
  nn::ConvSpec spec{1, 1, 1, {2.0}, {0.0}};
  const NodeId c = add_conv(g, in, "c", spec);
  add_output(g, c, "y");
  std::get<ConvAttrs>(g.node(c).attrs).weights = "missing";
  EXPECT_THROW(g.validate(), Error);
}

TEST(Graph, EditingKeepsTopologicalOrder) {
  Graph g;
  const NodeId in = add_input(g, {1, 1, 1});
  const NodeId r = add_simple(g, OpKind::kRelu, in, "relu");
  const NodeId out = add_output(g, r, "y");
  const NodeId a = g.insert_after(r, OpKind::kAffine, "a", {r}, AffineAttrs{{2.0}, {1.0}});
  g.replace_uses(r, a, a);
  g.validate();
  EXPECT_EQ(g.node(out).inputs, std::vector<NodeId>{a});
  EXPECT_EQ(execute(g, row({-3})).at("y").values()[0], 1.0);
  g.replace_uses(a, r);
  g.remove(a);
  g.validate();
  EXPECT_EQ(g.count(OpKind::kAffine), 0u);
  EXPECT_EQ(g.census().at("Relu"), 1u);
}

TEST(Graph, UniqueTensorNames) {
  Graph g;
  g.set_tensor("w", TensorData{{1}, {1.0}});
  EXPECT_EQ(g.unique_tensor_name("v"), "v");
  EXPECT_NE(g.unique_tensor_name("w"), "w");
}

TEST(Graph, KindNamesRoundTrip) {
  for (OpKind k : {OpKind::kInput, OpKind::kConv, OpKind::kMultiThreshold, OpKind::kL2Norm}) {
    EXPECT_EQ(kind_from_name(kind_name(k)), k);
  }
  EXPECT_THROW(kind_from_name("Gemm"), Error);
}

}  // namespace
}  // namespace qsp::graph
