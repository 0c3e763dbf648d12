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

#include "qsp/graph/executor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "qsp/nn/ops.hpp"
#include "qsp/quant/thresholds.hpp"

namespace qsp::graph {
namespace {

nn::Tensor as_real(const Value& v) {
  if (const auto* t = std::get_if<nn::Tensor>(&v)) return *t;
  return nn::to_real(std::get<nn::IntTensor>(v));
}

nn::IntConvSpec int_conv_spec(const Graph& g, const ConvAttrs& conv) {
  nn::IntConvSpec spec;
  spec.in_channels = conv.in_channels;
  spec.out_channels = conv.out_channels;
  spec.kernel = conv.kernel;
  const auto& w = g.tensor(conv.weights).values;
  spec.weights.reserve(w.size());
  for (double v : w) spec.weights.push_back(static_cast<std::int32_t>(v));
  spec.bias.assign(conv.out_channels, 0);
  if (!conv.bias.empty()) {
    const auto& b = g.tensor(conv.bias).values;
    for (std::size_t o = 0; o < b.size(); ++o) spec.bias[o] = static_cast<std::int64_t>(b[o]);
  }
  return spec;
}

Value run_conv(const Graph& g, const Node& node, const ConvAttrs& conv, const Value& in) {
  if (conv.integer) {
    const auto* x = std::get_if<nn::IntTensor>(&in);
    require(x != nullptr, ErrorKind::kInvalidGraph,
            "integer conv '" + node.name + "' fed a real tensor");
    return nn::conv2d(*x, int_conv_spec(g, conv));
  }
  nn::ConvSpec spec = conv_spec(g, conv);
  const nn::Tensor x = as_real(in);
  if (!conv.weight_quant) return nn::conv2d(x, spec);

  // y[o] = s_w[o] * sum(Q * x) + bias[o]
  const auto& wq = *conv.weight_quant;
  const auto params = quant::QuantParams::signed_channels(wq.bits, wq.scales);
  const std::size_t per_out = spec.weights.size() / spec.out_channels;
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    for (std::size_t i = 0; i < per_out; ++i) {
      double& w = spec.weights[o * per_out + i];
      w = static_cast<double>(quant::quantize_value(w, wq.scales[o], params.qmin(), params.qmax()));
    }
  }
  const std::vector<double> bias = spec.bias;
  std::fill(spec.bias.begin(), spec.bias.end(), 0.0);
  nn::Tensor y = nn::conv2d(x, spec);
  for (std::size_t o = 0; o < y.channels(); ++o) {
    for (double& v : y.channel(o)) v = wq.scales[o] * v + bias[o];
  }
  return y;
}

nn::IntTensor run_threshold(const Node& node, const ThresholdAttrs& mt, const Value& in) {
  if (mt.integer) {
    const auto* x = std::get_if<nn::IntTensor>(&in);
    require(x != nullptr, ErrorKind::kInvalidGraph,
            "integer threshold '" + node.name + "' fed a real tensor");
    const auto& set = mt.thresholds;
    require(set.rows == 1 || set.rows == x->channels(), ErrorKind::kInvalidGraph,
            "threshold '" + node.name + "' row count does not match its input");
    nn::IntTensor out(x->shape());
    for (std::size_t c = 0; c < x->channels(); ++c) {
      const std::size_t r = set.rows == 1 ? 0 : c;
      const auto first = mt.integer_values.begin() + static_cast<std::ptrdiff_t>(r * set.count);
      const auto last = first + static_cast<std::ptrdiff_t>(set.count);
      auto src = x->channel(c);
      auto dst = out.channel(c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::upper_bound(first, last, src[i]) - first;
    }
    return out;
  }
  return quant::apply_thresholds(as_real(in), mt.thresholds).values;
}

template <typename T>
Value shape_op(const Value& in, T&& op) {
  return std::visit([&](const auto& x) -> Value { return op(x); }, in);
}

Value run_node(const Graph& g, const Node& node, const Value& in) {
  switch (node.kind) {
    case OpKind::kInput:
    case OpKind::kOutput:
      return in;
    case OpKind::kConv:
      return run_conv(g, node, std::get<ConvAttrs>(node.attrs), in);
    case OpKind::kMaxPool:
      return shape_op(in, [](const auto& x) { return nn::maxpool2x2(x); });
    case OpKind::kDepthToSpace: {
      const std::size_t block = std::get<DepthToSpaceAttrs>(node.attrs).block;
      return shape_op(in, [block](const auto& x) { return nn::depth_to_space(x, block); });
    }
    case OpKind::kRelu:
      return nn::relu(as_real(in));
    case OpKind::kQuant:
      return quant::quantize(as_real(in), std::get<QuantAttrs>(node.attrs).params).values;
    case OpKind::kDequant: {
      const auto& params = std::get<QuantAttrs>(node.attrs).params;
      nn::Tensor x = as_real(in);
      for (std::size_t c = 0; c < x.channels(); ++c) {
        const double s = params.scale_for(c);
        for (double& v : x.channel(c)) v *= s;
      }
      return x;
    }
    case OpKind::kAffine: {
      const auto& affine = std::get<AffineAttrs>(node.attrs);
      nn::Tensor x = as_real(in);
      require(affine.scale.size() == 1 || affine.scale.size() == x.channels(),
              ErrorKind::kInvalidGraph, "affine '" + node.name + "' scale length mismatch");
      require(affine.offset.size() == 1 || affine.offset.size() == x.channels(),
              ErrorKind::kInvalidGraph, "affine '" + node.name + "' offset length mismatch");
      for (std::size_t c = 0; c < x.channels(); ++c) {
        const double a = affine.scale_at(c);
        const double b = affine.offset_at(c);
        for (double& v : x.channel(c)) v = a * v + b;
      }
      return x;
    }
    case OpKind::kMultiThreshold:
      return run_threshold(node, std::get<ThresholdAttrs>(node.attrs), in);
    case OpKind::kSoftmax:
      return nn::softmax_channels(as_real(in), std::get<SoftmaxAttrs>(node.attrs).mode);
    case OpKind::kResize:
      return nn::upsample_bilinear(as_real(in), std::get<ResizeAttrs>(node.attrs).factor);
    case OpKind::kL2Norm:
      return nn::l2_normalize_channels(as_real(in), std::get<L2NormAttrs>(node.attrs).eps);
  }
  fail(ErrorKind::kInvalidGraph, "unknown node kind");
}

}  // namespace

OutputMap execute(const Graph& g, const nn::Tensor& input) {
  g.validate();
  const auto& shape = std::get<InputAttrs>(g.node(g.input_node()).attrs).shape;
  require(input.channels() == shape.channels, ErrorKind::kInvalidArgument,
          "graph input expects " + std::to_string(shape.channels) + " channels, got " +
              std::to_string(input.channels()));

  // Values are released once their last consumer has run.
  std::unordered_map<NodeId, std::size_t> pending;
  for (const auto& n : g.nodes()) {
    for (NodeId in : n.inputs) ++pending[in];
  }
  std::unordered_map<NodeId, Value> values;
  OutputMap outputs;
  for (const auto& n : g.nodes()) {
    Value out = n.kind == OpKind::kInput ? Value{input} : run_node(g, n, values.at(n.inputs[0]));
    for (NodeId in : n.inputs) {
      if (--pending[in] == 0) values.erase(in);
    }
    if (n.kind == OpKind::kOutput) {
      outputs[std::get<OutputAttrs>(n.attrs).name] = as_real(out);
    } else if (pending[n.id] > 0) {
      values.emplace(n.id, std::move(out));
    }
  }
  return outputs;
}

OutputMap execute_reference(const Graph& g, const nn::Tensor& input) { return execute(g, input); }

}  // namespace qsp::graph
