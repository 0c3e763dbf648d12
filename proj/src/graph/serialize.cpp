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

#include "qsp/graph/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>

#include <json.hpp>

#include "qsp/io/archive.hpp"

namespace qsp::graph {
namespace {

using nlohmann::json;

json quant_params_json(const quant::QuantParams& p) {
  json j{{"bits", p.bit_width}, {"signed", p.is_signed}};
  if (p.per_channel()) {
    j["scales"] = std::get<quant::PerChannel>(p.scale).scales;
  } else {
    j["scale"] = std::get<quant::PerTensor>(p.scale).scale;
  }
  return j;
}

quant::QuantParams quant_params_from(const json& j) {
  quant::QuantParams p;
  p.bit_width = j.at("bits").get<int>();
  p.is_signed = j.at("signed").get<bool>();
  if (j.contains("scales")) {
    p.scale = quant::PerChannel{j.at("scales").get<std::vector<double>>()};
  } else {
    p.scale = quant::PerTensor{j.at("scale").get<double>()};
  }
  return p;
}

json attrs_json(const Node& n) {
  json j = json::object();
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, InputAttrs>) {
          j["shape"] = {a.shape.channels, a.shape.height, a.shape.width};
        } else if constexpr (std::is_same_v<A, OutputAttrs>) {
          j["name"] = a.name;
        } else if constexpr (std::is_same_v<A, ConvAttrs>) {
          j = {{"in_channels", a.in_channels}, {"out_channels", a.out_channels},
               {"kernel", a.kernel},           {"weights", a.weights},
               {"bias", a.bias},               {"layer", a.layer},
               {"weight_bits", a.weight_bits}, {"integer", a.integer},
               {"input_bits", a.input_bits},   {"accumulator_bits", a.accumulator_bits}};
          if (a.weight_quant) {
            j["weight_quant"] = {{"bits", a.weight_quant->bits}, {"scales", a.weight_quant->scales}};
          }
        } else if constexpr (std::is_same_v<A, QuantAttrs>) {
          j = quant_params_json(a.params);
        } else if constexpr (std::is_same_v<A, AffineAttrs>) {
          j = {{"scale", a.scale}, {"offset", a.offset}};
        } else if constexpr (std::is_same_v<A, ThresholdAttrs>) {
          j = {{"rows", a.thresholds.rows},
               {"count", a.thresholds.count},
               {"values", a.thresholds.values},
               {"out_bits", a.thresholds.out_bit_width},
               {"out_scale", a.thresholds.out_scale},
               {"absorbed_scale", a.absorbed_scale},
               {"absorbed_offset", a.absorbed_offset},
               {"integer", a.integer}};
          if (a.integer) j["integer_values"] = a.integer_values;
        } else if constexpr (std::is_same_v<A, SoftmaxAttrs>) {
          j = {{"mode", a.mode.variant == nn::SoftmaxMode::Variant::kFloatE ? "float_e" : "fixed_base2"},
               {"bits", a.mode.bits}};
        } else if constexpr (std::is_same_v<A, DepthToSpaceAttrs>) {
          j["block"] = a.block;
        } else if constexpr (std::is_same_v<A, ResizeAttrs>) {
          j["factor"] = a.factor;
        } else if constexpr (std::is_same_v<A, L2NormAttrs>) {
          j["eps"] = a.eps;
        }
      },
      n.attrs);
  return j;
}

Attrs attrs_from(OpKind kind, const json& j) {
  switch (kind) {
    case OpKind::kInput: {
      const auto s = j.at("shape").get<std::vector<std::size_t>>();
      require(s.size() == 3, ErrorKind::kParseError, "input shape needs 3 entries");
      return InputAttrs{nn::Shape{s[0], s[1], s[2]}};
    }
    case OpKind::kOutput:
      return OutputAttrs{j.at("name").get<std::string>()};
    case OpKind::kConv: {
      ConvAttrs a;
      a.in_channels = j.at("in_channels").get<std::size_t>();
      a.out_channels = j.at("out_channels").get<std::size_t>();
      a.kernel = j.at("kernel").get<std::size_t>();
      a.weights = j.at("weights").get<std::string>();
      a.bias = j.value("bias", std::string{});
      a.layer = j.value("layer", std::string{});
      a.weight_bits = j.value("weight_bits", 0);
      a.integer = j.value("integer", false);
      a.input_bits = j.value("input_bits", 0);
      a.accumulator_bits = j.value("accumulator_bits", 0);
      if (j.contains("weight_quant")) {
        a.weight_quant = WeightQuant{j["weight_quant"].at("bits").get<int>(),
                                     j["weight_quant"].at("scales").get<std::vector<double>>()};
      }
      return a;
    }
    case OpKind::kQuant:
    case OpKind::kDequant:
      return QuantAttrs{quant_params_from(j)};
    case OpKind::kAffine:
      return AffineAttrs{j.at("scale").get<std::vector<double>>(),
                         j.at("offset").get<std::vector<double>>()};
    case OpKind::kMultiThreshold: {
      ThresholdAttrs a;
      a.thresholds.rows = j.at("rows").get<std::size_t>();
      a.thresholds.count = j.at("count").get<std::size_t>();
      a.thresholds.values = j.at("values").get<std::vector<double>>();
      a.thresholds.out_bit_width = j.at("out_bits").get<int>();
      a.thresholds.out_scale = j.at("out_scale").get<double>();
      a.absorbed_scale = j.at("absorbed_scale").get<std::vector<double>>();
      a.absorbed_offset = j.at("absorbed_offset").get<std::vector<double>>();
      a.integer = j.value("integer", false);
      if (a.integer) a.integer_values = j.at("integer_values").get<std::vector<std::int64_t>>();
      return a;
    }
    case OpKind::kSoftmax: {
      SoftmaxAttrs a;
      const auto mode = j.at("mode").get<std::string>();
      require(mode == "float_e" || mode == "fixed_base2", ErrorKind::kParseError,
              "unknown softmax mode '" + mode + "'");
      a.mode.variant = mode == "float_e" ? nn::SoftmaxMode::Variant::kFloatE
                                         : nn::SoftmaxMode::Variant::kFixedBase2;
      a.mode.bits = j.value("bits", 8);
      return a;
    }
    case OpKind::kDepthToSpace:
      return DepthToSpaceAttrs{j.at("block").get<std::size_t>()};
    case OpKind::kResize:
      return ResizeAttrs{j.at("factor").get<std::size_t>()};
    case OpKind::kL2Norm:
      return L2NormAttrs{j.at("eps").get<double>()};
    case OpKind::kMaxPool:
    case OpKind::kRelu:
      return std::monostate{};
  }
  return std::monostate{};
}

bool fits_i32(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v) || v != std::trunc(v) || std::abs(v) > 2147483647.0) return false;
  }
  return true;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::string graph_to_json(const Graph& g, const std::string& tensor_archive) {
  json doc;
  doc["format"] = "qsp-graph";
  doc["version"] = kGraphFormatVersion;
  if (!tensor_archive.empty()) doc["tensor_archive"] = tensor_archive;
  doc["census"] = g.census();
  json nodes = json::array();
  for (const auto& n : g.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"kind", kind_name(n.kind)},
                     {"name", n.name},
                     {"inputs", n.inputs},
                     {"attrs", attrs_json(n)}});
  }
  doc["nodes"] = std::move(nodes);
  json tensors = json::object();
  for (const auto& [name, t] : g.tensors()) tensors[name] = {{"shape", t.shape}};
  doc["tensors"] = std::move(tensors);
  return doc.dump(2) + "\n";
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  const std::string archive_name = path.stem().string() + ".tensors";
  io::Archive archive;
  archive.metadata["content"] = "graph tensors";
  for (const auto& [name, t] : g.tensors()) {
    archive.tensors.push_back(io::ArchiveTensor{
        name, t.shape, fits_i32(t.values) ? io::ElementType::kI32 : io::ElementType::kF64,
        t.values});
  }
  io::write_archive(path.parent_path() / archive_name, archive);
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path.string());
  out << graph_to_json(g, archive_name);
}

Graph load_graph(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  Graph g;
  try {
    require(doc.value("format", std::string{}) == "qsp-graph", ErrorKind::kParseError,
            path.string() + " is not a graph document");
    const int version = doc.at("version").get<int>();
    require(version == kGraphFormatVersion, ErrorKind::kParseError,
            "unsupported graph format version " + std::to_string(version));
    if (doc.contains("tensor_archive")) {
      const auto archive =
          io::read_archive(path.parent_path() / doc["tensor_archive"].get<std::string>());
      for (const auto& t : archive.tensors) g.set_tensor(t.name, TensorData{t.shape, t.values});
    }
    std::map<NodeId, NodeId> ids;
    for (const auto& jn : doc.at("nodes")) {
      const OpKind kind = kind_from_name(jn.at("kind").get<std::string>());
      std::vector<NodeId> inputs;
      for (const auto& in : jn.at("inputs")) {
        const auto it = ids.find(in.get<NodeId>());
        require(it != ids.end(), ErrorKind::kInvalidGraph,
                "node " + jn.at("id").dump() + " reads an undefined node " + in.dump());
        inputs.push_back(it->second);
      }
      ids[jn.at("id").get<NodeId>()] =
          g.add(kind, jn.at("name").get<std::string>(), std::move(inputs),
                attrs_from(kind, jn.at("attrs")));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  g.validate();
  return g;
}

std::string reports_to_json(const std::vector<PassReport>& reports) {
  json doc = json::array();
  for (const auto& r : reports) {
    doc.push_back({{"pass", r.pass}, {"round", r.round}, {"rewritten", r.rewritten},
                   {"remaining", r.remaining}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace qsp::graph
