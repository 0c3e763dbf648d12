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
#include <string_view>
#include <variant>
#include <vector>

#include "qsp/nn/ops.hpp"
#include "qsp/quant/quant.hpp"
#include "qsp/quant/thresholds.hpp"

namespace qsp::graph {

enum class OpKind {
  kInput,
  kOutput,
  kConv,
  kMaxPool,
  kRelu,
  kQuant,
  kDequant,
  kAffine,
  kMultiThreshold,
  kSoftmax,
  kDepthToSpace,
  kResize,
  kL2Norm,
};

std::string_view kind_name(OpKind kind);
OpKind kind_from_name(std::string_view name);

using NodeId = int;

struct InputAttrs {
  nn::Shape shape;  // (C, H, W); H and W are the nominal verification size
};

struct OutputAttrs {
  std::string name;
};

/// Signed symmetric per-output-channel weight quantiser.
struct WeightQuant {
  int bits = 8;
  std::vector<double> scales;
};

struct ConvAttrs {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::string weights;  // tensor name, (out, in, k, k)
  std::string bias;     // tensor name, (out); empty means zero bias
  std::string layer;    // architecture layer this node implements, if any
  /// Fake-quantised weights: y = s_w[o] * sum(Q * x) + bias, Q = quantize(W).
  std::optional<WeightQuant> weight_quant;
  int weight_bits = 0;  // width of integer-valued weights after scale extraction
  bool integer = false;  // lowered: int32 weights, int64 bias and accumulator
  int input_bits = 0;        // lowered: width of the integer activation feeding the conv
  int accumulator_bits = 0;  // lowered: proven accumulator width
};

struct QuantAttrs {
  quant::QuantParams params;
};

/// y = scale[c] * x + offset[c]; length-1 vectors broadcast.
struct AffineAttrs {
  std::vector<double> scale;
  std::vector<double> offset;

  double scale_at(std::size_t c) const { return scale[scale.size() == 1 ? 0 : c]; }
  double offset_at(std::size_t c) const { return offset[offset.size() == 1 ? 0 : c]; }
  bool uniform() const;
  bool identity() const;
};

struct ThresholdAttrs {
  quant::ThresholdSet thresholds;
  /// Composite affine folded into the thresholds: the pre-absorption input was
  /// absorbed_scale * x + absorbed_offset. Identity when nothing was absorbed.
  std::vector<double> absorbed_scale{1.0};
  std::vector<double> absorbed_offset{0.0};
  bool integer = false;  // lowered: compare int64 inputs with integer_values
  std::vector<std::int64_t> integer_values;  // same layout as thresholds.values
};

struct SoftmaxAttrs {
  nn::SoftmaxMode mode;
};

struct DepthToSpaceAttrs {
  std::size_t block = 8;
};

struct ResizeAttrs {
  std::size_t factor = 8;
};

struct L2NormAttrs {
  double eps = 1e-12;
};

using Attrs = std::variant<std::monostate, InputAttrs, OutputAttrs, ConvAttrs, QuantAttrs,
                           AffineAttrs, ThresholdAttrs, SoftmaxAttrs, DepthToSpaceAttrs,
                           ResizeAttrs, L2NormAttrs>;

struct Node {
  NodeId id = -1;
  OpKind kind = OpKind::kInput;
  std::string name;
  std::vector<NodeId> inputs;
  Attrs attrs;
};

/// Named constant tensor (weights, biases). Values are stored in double
/// precision; integer tensors hold exact integers.
struct TensorData {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  bool operator==(const TensorData&) const = default;
};

/// Dataflow graph kept in topological order: every node appears after all of
/// its inputs. Each node has exactly one output, identified by its id.
class Graph {
 public:
  NodeId add(OpKind kind, std::string name, std::vector<NodeId> inputs, Attrs attrs = {});
  /// Inserts a node directly after `anchor` in the node order.
  NodeId insert_after(NodeId anchor, OpKind kind, std::string name, std::vector<NodeId> inputs,
                      Attrs attrs = {});
  void remove(NodeId id);
  /// Rewires every consumer of `from` (except `except`) to read `to`.
  void replace_uses(NodeId from, NodeId to, std::optional<NodeId> except = std::nullopt);
  /// Moves node `id` to directly after `anchor` in the node order.
  void move_after(NodeId id, NodeId anchor);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const;
  Node& node(NodeId id);
  bool contains(NodeId id) const;
  std::size_t position(NodeId id) const;
  std::vector<NodeId> consumers(NodeId id) const;
  NodeId input_node() const;
  /// Output nodes in graph order.
  std::vector<NodeId> outputs() const;
  std::size_t count(OpKind kind) const;
  std::map<std::string, std::size_t> census() const;

  void set_tensor(const std::string& name, TensorData data);
  const TensorData& tensor(const std::string& name) const;
  bool has_tensor(const std::string& name) const;
  const std::map<std::string, TensorData>& tensors() const { return tensors_; }
  /// Returns `base` or `base.N`, whichever is not yet taken.
  std::string unique_tensor_name(const std::string& base) const;
  /// Drops tensors no node references.
  void prune_tensors();

  /// Throws invalid-graph on dangling edges, cycles/out-of-order nodes,
  /// duplicate ids, missing tensors, or attributes not matching the kind.
  void validate() const;

 private:
  std::vector<Node> nodes_;
  std::map<std::string, TensorData> tensors_;
  NodeId next_id_ = 0;
};

/// Convenience builders used by model construction and tests.
NodeId add_input(Graph& g, nn::Shape shape);
NodeId add_output(Graph& g, NodeId from, const std::string& name);
NodeId add_conv(Graph& g, NodeId from, const std::string& name, const nn::ConvSpec& spec,
                std::optional<WeightQuant> weight_quant = std::nullopt,
                const std::string& layer = {});
NodeId add_affine(Graph& g, NodeId from, const std::string& name, std::vector<double> scale,
                  std::vector<double> offset);
NodeId add_quant(Graph& g, NodeId from, const std::string& name, quant::QuantParams params);
NodeId add_dequant(Graph& g, NodeId from, const std::string& name, quant::QuantParams params);
NodeId add_threshold(Graph& g, NodeId from, const std::string& name, quant::ThresholdSet set);
NodeId add_simple(Graph& g, OpKind kind, NodeId from, const std::string& name, Attrs attrs = {});

/// Builds the ConvSpec a node describes, reading its tensors from the graph.
nn::ConvSpec conv_spec(const Graph& g, const ConvAttrs& conv);

}  // namespace qsp::graph
