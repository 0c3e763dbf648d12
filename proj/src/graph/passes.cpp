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

#include "qsp/graph/passes.hpp"

#include <algorithm>
#include <set>

#include "qsp/quant/thresholds.hpp"

namespace qsp::graph {
namespace {

std::vector<double> widen(const std::vector<double>& v, std::size_t n) {
  if (v.size() == n) return v;
  require(v.size() == 1, ErrorKind::kInvalidGraph,
          "cannot broadcast " + std::to_string(v.size()) + " parameters to " + std::to_string(n));
  return std::vector<double>(n, v.front());
}

std::vector<NodeId> ids_of(const Graph& g, OpKind kind) {
  std::vector<NodeId> ids;
  for (const auto& n : g.nodes()) {
    if (n.kind == kind) ids.push_back(n.id);
  }
  return ids;
}

std::optional<NodeId> sole_consumer(const Graph& g, NodeId id) {
  const auto consumers = g.consumers(id);
  if (consumers.size() != 1) return std::nullopt;
  return consumers.front();
}

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Reorders A -> N into N -> A; every former consumer of N reads A instead.
void swap_past(Graph& g, NodeId affine, NodeId next) {
  const NodeId source = g.node(affine).inputs[0];
  g.node(next).inputs[0] = source;
  g.replace_uses(next, affine, affine);
  g.node(affine).inputs = {next};
  g.move_after(affine, next);
}

std::string describe(const Node& n) {
  return std::string(kind_name(n.kind)) + " node " + std::to_string(n.id) + " ('" + n.name + "')";
}

bool try_move(Graph& g, NodeId id) {
  const auto next_id = sole_consumer(g, id);
  if (!next_id) return false;
  Node& next = g.node(*next_id);
  auto& affine = std::get<AffineAttrs>(g.node(id).attrs);
  switch (next.kind) {
    case OpKind::kConv: {
      auto& conv = std::get<ConvAttrs>(next.attrs);
      if (conv.weight_quant || conv.integer) return false;
      if (!all_equal(affine.scale)) return false;
      if (std::any_of(affine.offset.begin(), affine.offset.end(), [](double b) { return b != 0; })) {
        return false;
      }
      const double a = affine.scale.front();
      if (!conv.bias.empty()) {
        if (a == 0) return false;
        TensorData bias = g.tensor(conv.bias);
        for (double& b : bias.values) b /= a;
        conv.bias = g.unique_tensor_name(next.name + ".bias");
        g.set_tensor(conv.bias, std::move(bias));
      }
      affine.scale = {a};
      affine.offset = {0.0};
      break;
    }
    case OpKind::kMaxPool:
      for (double a : affine.scale) {
        if (!(a > 0)) {
          fail(ErrorKind::kUnsupportedTransform,
               describe(g.node(id)) + " has a non-positive scale and cannot cross " + describe(next));
        }
      }
      break;
    case OpKind::kResize:
      break;
    case OpKind::kDepthToSpace: {
      const std::size_t group = std::get<DepthToSpaceAttrs>(next.attrs).block *
                                std::get<DepthToSpaceAttrs>(next.attrs).block;
      const std::size_t n = std::max(affine.scale.size(), affine.offset.size());
      if (n == 1) break;
      if (n % group != 0) return false;
      const auto scale = widen(affine.scale, n);
      const auto offset = widen(affine.offset, n);
      std::vector<double> new_scale;
      std::vector<double> new_offset;
      for (std::size_t c = 0; c < n; c += group) {
        for (std::size_t k = 1; k < group; ++k) {
          if (scale[c + k] != scale[c] || offset[c + k] != offset[c]) return false;
        }
        new_scale.push_back(scale[c]);
        new_offset.push_back(offset[c]);
      }
      affine.scale = std::move(new_scale);
      affine.offset = std::move(new_offset);
      break;
    }
    default:
      return false;
  }
  swap_past(g, id, *next_id);
  return true;
}

PassReport make_report(const Graph& g, std::string pass, int round, std::size_t rewritten) {
  return PassReport{std::move(pass), round, rewritten, g.census()};
}

}  // namespace

std::size_t canonicalize(Graph& g) {
  std::size_t rewritten = 0;
  for (const auto& n : std::vector<Node>(g.nodes())) {
    if (n.kind != OpKind::kAffine && n.kind != OpKind::kDequant) continue;
    const auto consumers = g.consumers(n.id);
    for (std::size_t i = 1; i < consumers.size(); ++i) {
      const NodeId copy = g.insert_after(n.id, n.kind, n.name + "." + std::to_string(i),
                                         n.inputs, n.attrs);
      for (auto& in : g.node(consumers[i]).inputs) {
        if (in == n.id) in = copy;
      }
      ++rewritten;
    }
  }
  for (NodeId id : ids_of(g, OpKind::kDequant)) {
    Node& n = g.node(id);
    const auto& params = std::get<QuantAttrs>(n.attrs).params;
    std::vector<double> scale;
    for (std::size_t c = 0; c < params.scale_count(); ++c) scale.push_back(params.scale_for(c));
    n.kind = OpKind::kAffine;
    n.attrs = AffineAttrs{std::move(scale), {0.0}};
    ++rewritten;
  }
  for (NodeId id : ids_of(g, OpKind::kConv)) {
    auto& conv = std::get<ConvAttrs>(g.node(id).attrs);
    if (!conv.weight_quant) continue;
    const WeightQuant wq = *conv.weight_quant;
    const auto params = quant::QuantParams::signed_channels(wq.bits, wq.scales);
    TensorData weights = g.tensor(conv.weights);
    const std::size_t per_out = weights.values.size() / conv.out_channels;
    for (std::size_t i = 0; i < weights.values.size(); ++i) {
      weights.values[i] = static_cast<double>(quant::quantize_value(
          weights.values[i], wq.scales[i / per_out], params.qmin(), params.qmax()));
    }
    std::vector<double> offset(conv.out_channels, 0.0);
    if (!conv.bias.empty()) offset = g.tensor(conv.bias).values;
    const std::string name = g.node(id).name;
    conv.weights = g.unique_tensor_name(name + ".weight_int");
    g.set_tensor(conv.weights, std::move(weights));
    conv.bias.clear();
    conv.weight_quant.reset();
    conv.weight_bits = wq.bits;
    const NodeId scale = g.insert_after(id, OpKind::kAffine, name + ".scale", {id},
                                        AffineAttrs{wq.scales, std::move(offset)});
    g.replace_uses(id, scale, scale);
    ++rewritten;
  }
  return rewritten;
}

std::size_t fuse_affines(Graph& g) {
  std::size_t rewritten = 0;
  for (NodeId id : ids_of(g, OpKind::kAffine)) {
    if (!g.contains(id)) continue;
    for (;;) {
      Node& second = g.node(id);
      const NodeId first_id = second.inputs[0];
      const Node& first = g.node(first_id);
      if (first.kind != OpKind::kAffine || g.consumers(first_id).size() != 1) break;
      const auto& a1 = std::get<AffineAttrs>(first.attrs);
      auto& a2 = std::get<AffineAttrs>(second.attrs);
      const std::size_t n =
          std::max({a1.scale.size(), a1.offset.size(), a2.scale.size(), a2.offset.size()});
      const auto s1 = widen(a1.scale, n), b1 = widen(a1.offset, n);
      const auto s2 = widen(a2.scale, n), b2 = widen(a2.offset, n);
      AffineAttrs fused;
      for (std::size_t c = 0; c < n; ++c) {
        fused.scale.push_back(s2[c] * s1[c]);
        fused.offset.push_back(s2[c] * b1[c] + b2[c]);
      }
      if (all_equal(fused.scale)) fused.scale.resize(1);
      if (all_equal(fused.offset)) fused.offset.resize(1);
      a2 = std::move(fused);
      second.inputs = first.inputs;
      g.remove(first_id);
      ++rewritten;
    }
  }
  return rewritten;
}

std::size_t move_affines(Graph& g) {
  std::size_t rewritten = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId id : ids_of(g, OpKind::kAffine)) {
      while (try_move(g, id)) {
        ++rewritten;
        changed = true;
      }
    }
  }
  return rewritten;
}

std::size_t quant_to_multithreshold(Graph& g) {
  std::size_t rewritten = 0;
  for (NodeId id : ids_of(g, OpKind::kQuant)) {
    Node& quant_node = g.node(id);
    const auto params = std::get<QuantAttrs>(quant_node.attrs).params;
    const NodeId relu_id = quant_node.inputs[0];
    if (g.node(relu_id).kind != OpKind::kRelu || params.is_signed) continue;
    ThresholdAttrs mt;
    mt.thresholds = quant::quant_to_thresholds(params);
    quant_node.kind = OpKind::kMultiThreshold;
    quant_node.attrs = std::move(mt);
    quant_node.inputs = g.node(relu_id).inputs;
    if (g.consumers(relu_id).empty()) g.remove(relu_id);
    ++rewritten;
  }
  return rewritten;
}

std::size_t absorb_into_thresholds(Graph& g) {
  std::size_t rewritten = 0;
  for (NodeId id : ids_of(g, OpKind::kMultiThreshold)) {
    for (;;) {
      Node& mt_node = g.node(id);
      const NodeId affine_id = mt_node.inputs[0];
      const Node& affine_node = g.node(affine_id);
      if (affine_node.kind != OpKind::kAffine || g.consumers(affine_id).size() != 1) break;
      const auto& affine = std::get<AffineAttrs>(affine_node.attrs);
      auto& mt = std::get<ThresholdAttrs>(mt_node.attrs);
      try {
        mt.thresholds = quant::absorb_affine(mt.thresholds, affine.scale, affine.offset);
      } catch (const Error& e) {
        fail(e.kind(), describe(affine_node) + " cannot be absorbed into " + describe(mt_node) +
                           ": " + e.what());
      }
      // The original thresholds now see S * (a x + b) + O.
      const std::size_t n = std::max({mt.absorbed_scale.size(), mt.absorbed_offset.size(),
                                      affine.scale.size(), affine.offset.size()});
      const auto s = widen(mt.absorbed_scale, n), o = widen(mt.absorbed_offset, n);
      const auto a = widen(affine.scale, n), b = widen(affine.offset, n);
      mt.absorbed_scale.assign(n, 0.0);
      mt.absorbed_offset.assign(n, 0.0);
      for (std::size_t c = 0; c < n; ++c) {
        mt.absorbed_scale[c] = s[c] * a[c];
        mt.absorbed_offset[c] = s[c] * b[c] + o[c];
      }
      mt_node.inputs = affine_node.inputs;
      g.remove(affine_id);
      ++rewritten;
    }
  }
  return rewritten;
}

void check_streamlined(const Graph& g) {
  // Walk backwards from every MultiThreshold; single-input nodes make this a
  // chain walk.
  for (const auto& n : g.nodes()) {
    if (n.kind != OpKind::kMultiThreshold) continue;
    for (NodeId cur = n.inputs[0];;) {
      const Node& up = g.node(cur);
      if (up.kind == OpKind::kAffine) {
        fail(ErrorKind::kUnsupportedTransform,
             describe(up) + " still reaches " + describe(n) + " after streamlining");
      }
      if (up.inputs.empty()) break;
      cur = up.inputs[0];
    }
  }
}

StreamlineResult streamline(Graph g, const PassObserver& observer) {
  g.validate();
  StreamlineResult result;
  auto record = [&](const char* pass, int round, std::size_t rewritten) {
    if (rewritten == 0) return;
    result.reports.push_back(make_report(g, pass, round, rewritten));
    if (observer) observer(result.reports.back(), g);
  };
  record("canonicalize", 0, canonicalize(g));
  result.affine_counts.push_back(g.count(OpKind::kAffine));

  constexpr int kMaxRounds = 64;
  for (int round = 1;; ++round) {
    require(round <= kMaxRounds, ErrorKind::kUnsupportedTransform,
            "streamline did not reach a fixpoint");
    std::size_t changed = 0;
    const std::size_t moved = move_affines(g);
    record("move-affine", round, moved);
    const std::size_t converted = quant_to_multithreshold(g);
    record("quant-to-multithreshold", round, converted);
    const std::size_t absorbed = absorb_into_thresholds(g);
    record("absorb-affine", round, absorbed);
    const std::size_t fused = fuse_affines(g);
    record("fuse-affine", round, fused);
    changed = moved + converted + absorbed + fused;
    if (changed == 0) break;
    result.affine_counts.push_back(g.count(OpKind::kAffine));
  }
  check_streamlined(g);
  g.prune_tensors();
  g.validate();
  result.graph = std::move(g);
  return result;
}

}  // namespace qsp::graph
