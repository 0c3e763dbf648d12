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

#include "qsp/graph/ir.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

namespace qsp::graph {
namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 13> kKindNames{{
    {OpKind::kInput, "Input"},
    {OpKind::kOutput, "Output"},
    {OpKind::kConv, "Conv"},
    {OpKind::kMaxPool, "MaxPool"},
    {OpKind::kRelu, "Relu"},
    {OpKind::kQuant, "Quant"},
    {OpKind::kDequant, "Dequant"},
    {OpKind::kAffine, "Affine"},
    {OpKind::kMultiThreshold, "MultiThreshold"},
    {OpKind::kSoftmax, "Softmax"},
    {OpKind::kDepthToSpace, "DepthToSpace"},
    {OpKind::kResize, "Resize"},
    {OpKind::kL2Norm, "L2Norm"},
}};

[[noreturn]] void bad_graph(const std::string& message) { fail(ErrorKind::kInvalidGraph, message); }

bool attrs_match(OpKind kind, const Attrs& attrs) {
  switch (kind) {
    case OpKind::kInput: return std::holds_alternative<InputAttrs>(attrs);
    case OpKind::kOutput: return std::holds_alternative<OutputAttrs>(attrs);
    case OpKind::kConv: return std::holds_alternative<ConvAttrs>(attrs);
    case OpKind::kQuant:
    case OpKind::kDequant: return std::holds_alternative<QuantAttrs>(attrs);
    case OpKind::kAffine: return std::holds_alternative<AffineAttrs>(attrs);
    case OpKind::kMultiThreshold: return std::holds_alternative<ThresholdAttrs>(attrs);
    case OpKind::kSoftmax: return std::holds_alternative<SoftmaxAttrs>(attrs);
    case OpKind::kDepthToSpace: return std::holds_alternative<DepthToSpaceAttrs>(attrs);
    case OpKind::kResize: return std::holds_alternative<ResizeAttrs>(attrs);
    case OpKind::kL2Norm: return std::holds_alternative<L2NormAttrs>(attrs);
    case OpKind::kMaxPool:
    case OpKind::kRelu: return std::holds_alternative<std::monostate>(attrs);
  }
  return false;
}

}  // namespace

std::string_view kind_name(OpKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

OpKind kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  bad_graph("unknown node kind '" + std::string(name) + "'");
}

bool AffineAttrs::uniform() const {
  auto flat = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  return flat(scale) && flat(offset);
}

bool AffineAttrs::identity() const {
  return std::all_of(scale.begin(), scale.end(), [](double a) { return a == 1.0; }) &&
         std::all_of(offset.begin(), offset.end(), [](double b) { return b == 0.0; });
}

NodeId Graph::add(OpKind kind, std::string name, std::vector<NodeId> inputs, Attrs attrs) {
  Node node{next_id_++, kind, std::move(name), std::move(inputs), std::move(attrs)};
  nodes_.push_back(std::move(node));
  return nodes_.back().id;
}

NodeId Graph::insert_after(NodeId anchor, OpKind kind, std::string name,
                           std::vector<NodeId> inputs, Attrs attrs) {
  const std::size_t pos = position(anchor);
  Node node{next_id_++, kind, std::move(name), std::move(inputs), std::move(attrs)};
  const NodeId id = node.id;
  nodes_.insert(nodes_.begin() + static_cast<std::ptrdiff_t>(pos + 1), std::move(node));
  return id;
}

void Graph::remove(NodeId id) {
  const std::size_t pos = position(id);
  nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(pos));
}

void Graph::replace_uses(NodeId from, NodeId to, std::optional<NodeId> except) {
  for (auto& n : nodes_) {
    if (except && n.id == *except) continue;
    for (auto& in : n.inputs) {
      if (in == from) in = to;
    }
  }
}

void Graph::move_after(NodeId id, NodeId anchor) {
  const std::size_t from = position(id);
  Node moved = std::move(nodes_[from]);
  nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(from));
  const std::size_t to = position(anchor);
  nodes_.insert(nodes_.begin() + static_cast<std::ptrdiff_t>(to + 1), std::move(moved));
}

const Node& Graph::node(NodeId id) const { return nodes_[position(id)]; }
Node& Graph::node(NodeId id) { return nodes_[position(id)]; }

bool Graph::contains(NodeId id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [id](const Node& n) { return n.id == id; });
}

std::size_t Graph::position(NodeId id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  bad_graph("no node with id " + std::to_string(id));
}

std::vector<NodeId> Graph::consumers(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (std::find(n.inputs.begin(), n.inputs.end(), id) != n.inputs.end()) out.push_back(n.id);
  }
  return out;
}

NodeId Graph::input_node() const {
  for (const auto& n : nodes_) {
    if (n.kind == OpKind::kInput) return n.id;
  }
  bad_graph("graph has no Input node");
}

std::vector<NodeId> Graph::outputs() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == OpKind::kOutput) out.push_back(n.id);
  }
  return out;
}

std::size_t Graph::count(OpKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind == kind; }));
}

std::map<std::string, std::size_t> Graph::census() const {
  std::map<std::string, std::size_t> out;
  for (const auto& n : nodes_) ++out[std::string(kind_name(n.kind))];
  return out;
}

void Graph::set_tensor(const std::string& name, TensorData data) {
  tensors_[name] = std::move(data);
}

const TensorData& Graph::tensor(const std::string& name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) bad_graph("missing tensor '" + name + "'");
  return it->second;
}

bool Graph::has_tensor(const std::string& name) const { return tensors_.count(name) > 0; }

std::string Graph::unique_tensor_name(const std::string& base) const {
  if (!has_tensor(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + "." + std::to_string(i);
    if (!has_tensor(candidate)) return candidate;
  }
}

void Graph::prune_tensors() {
  std::set<std::string> used;
  for (const auto& n : nodes_) {
    if (const auto* conv = std::get_if<ConvAttrs>(&n.attrs)) {
      used.insert(conv->weights);
      if (!conv->bias.empty()) used.insert(conv->bias);
    }
  }
  for (auto it = tensors_.begin(); it != tensors_.end();) {
    it = used.count(it->first) ? std::next(it) : tensors_.erase(it);
  }
}

void Graph::validate() const {
  std::set<NodeId> seen;
  std::size_t inputs = 0;
  for (const auto& n : nodes_) {
    if (seen.count(n.id)) bad_graph("duplicate node id " + std::to_string(n.id));
    if (!attrs_match(n.kind, n.attrs)) {
      bad_graph("node " + std::to_string(n.id) + " (" + std::string(kind_name(n.kind)) +
                ") carries attributes of another kind");
    }
    const std::size_t arity = n.kind == OpKind::kInput ? 0 : 1;
    if (n.inputs.size() != arity) {
      bad_graph("node " + std::to_string(n.id) + " has " + std::to_string(n.inputs.size()) +
                " inputs, expected " + std::to_string(arity));
    }
    for (NodeId in : n.inputs) {
      if (!seen.count(in)) {
        bad_graph("node " + std::to_string(n.id) + " reads " + std::to_string(in) +
                  (contains(in) ? ", which does not precede it (cycle or misordered graph)"
                                : ", which does not exist"));
      }
    }
    if (n.kind == OpKind::kInput) ++inputs;
    if (const auto* conv = std::get_if<ConvAttrs>(&n.attrs)) {
      const auto& w = tensor(conv->weights);
      if (w.values.size() != conv->out_channels * conv->in_channels * conv->kernel * conv->kernel) {
        bad_graph("conv node " + std::to_string(n.id) + " weight tensor size mismatch");
      }
      if (!conv->bias.empty() && tensor(conv->bias).values.size() != conv->out_channels) {
        bad_graph("conv node " + std::to_string(n.id) + " bias tensor size mismatch");
      }
    }
    if (const auto* affine = std::get_if<AffineAttrs>(&n.attrs)) {
      if (affine->scale.empty() || affine->offset.empty()) {
        bad_graph("affine node " + std::to_string(n.id) + " has empty parameters");
      }
    }
    seen.insert(n.id);
  }
  if (inputs != 1) bad_graph("graph must have exactly one Input node");
}

NodeId add_input(Graph& g, nn::Shape shape) {
  return g.add(OpKind::kInput, "input", {}, InputAttrs{shape});
}

NodeId add_output(Graph& g, NodeId from, const std::string& name) {
  return g.add(OpKind::kOutput, name, {from}, OutputAttrs{name});
}

NodeId add_conv(Graph& g, NodeId from, const std::string& name, const nn::ConvSpec& spec,
                std::optional<WeightQuant> weight_quant, const std::string& layer) {
  spec.validate();
  ConvAttrs conv;
  conv.in_channels = spec.in_channels;
  conv.out_channels = spec.out_channels;
  conv.kernel = spec.kernel;
  conv.layer = layer;
  conv.weights = g.unique_tensor_name(name + ".weight");
  g.set_tensor(conv.weights, TensorData{{spec.out_channels, spec.in_channels, spec.kernel, spec.kernel},
                                        spec.weights});
  if (std::any_of(spec.bias.begin(), spec.bias.end(), [](double b) { return b != 0.0; })) {
    conv.bias = g.unique_tensor_name(name + ".bias");
    g.set_tensor(conv.bias, TensorData{{spec.out_channels}, spec.bias});
  }
  if (weight_quant) {
    require(weight_quant->scales.size() == spec.out_channels, ErrorKind::kInvalidArgument,
            "weight quantiser needs one scale per output channel");
    conv.weight_bits = weight_quant->bits;
  }
  conv.weight_quant = std::move(weight_quant);
  return g.add(OpKind::kConv, name, {from}, std::move(conv));
}

NodeId add_affine(Graph& g, NodeId from, const std::string& name, std::vector<double> scale,
                  std::vector<double> offset) {
  return g.add(OpKind::kAffine, name, {from}, AffineAttrs{std::move(scale), std::move(offset)});
}

NodeId add_quant(Graph& g, NodeId from, const std::string& name, quant::QuantParams params) {
  params.validate();
  return g.add(OpKind::kQuant, name, {from}, QuantAttrs{std::move(params)});
}

NodeId add_dequant(Graph& g, NodeId from, const std::string& name, quant::QuantParams params) {
  params.validate();
  return g.add(OpKind::kDequant, name, {from}, QuantAttrs{std::move(params)});
}

NodeId add_threshold(Graph& g, NodeId from, const std::string& name, quant::ThresholdSet set) {
  set.validate();
  ThresholdAttrs attrs;
  attrs.thresholds = std::move(set);
  return g.add(OpKind::kMultiThreshold, name, {from}, std::move(attrs));
}

NodeId add_simple(Graph& g, OpKind kind, NodeId from, const std::string& name, Attrs attrs) {
  return g.add(kind, name, {from}, std::move(attrs));
}

nn::ConvSpec conv_spec(const Graph& g, const ConvAttrs& conv) {
  nn::ConvSpec spec;
  spec.in_channels = conv.in_channels;
  spec.out_channels = conv.out_channels;
  spec.kernel = conv.kernel;
  spec.weights = g.tensor(conv.weights).values;
  spec.bias = conv.bias.empty() ? std::vector<double>(conv.out_channels, 0.0)
                                : g.tensor(conv.bias).values;
  return spec;
}

}  // namespace qsp::graph
