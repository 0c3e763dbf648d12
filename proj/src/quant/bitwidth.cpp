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

#include "qsp/quant/bitwidth.hpp"

#include <fstream>
#include <sstream>

#include "qsp/common/error.hpp"
#include "qsp/superpoint/architecture.hpp"

namespace qsp::quant {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

BitWidthConfig BitWidthConfig::floating() {
  BitWidthConfig cfg;
  cfg.name_ = "fp";
  cfg.floating_ = true;
  return cfg;
}

BitWidthConfig BitWidthConfig::uniform(const std::string& name, int bits) {
  BitWidthConfig cfg;
  cfg.name_ = name;
  for (const auto& layer : superpoint::kLayers) {
    cfg.layers_[std::string(layer.name)] =
        LayerBits{bits, layer.relu ? std::optional<int>(bits) : std::nullopt};
  }
  return cfg;
}

BitWidthConfig BitWidthConfig::mixed424() {
  BitWidthConfig cfg = uniform("mixed424", 2);
  cfg.layers_["conv1a"] = LayerBits{4, 4};
  cfg.layers_["convPa"] = LayerBits{2, 4};  // last ReLU of the detector head
  cfg.layers_["convPb"] = LayerBits{4, std::nullopt};
  cfg.layers_["convDa"] = LayerBits{2, 4};  // last ReLU of the descriptor head
  cfg.layers_["convDb"] = LayerBits{4, std::nullopt};
  return cfg;
}

BitWidthConfig BitWidthConfig::from_option(const std::string& option) {
  if (option == "fp") return floating();
  if (option == "int8") return int8();
  if (option == "int4") return int4();
  if (option == "int3") return int3();
  if (option == "mixed424") return mixed424();
  return load(option);
}

BitWidthConfig BitWidthConfig::parse(const std::string& text) {
  BitWidthConfig cfg;
  cfg.name_ = "custom";
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::kParseError,
            "bit config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      cfg.name_ = value;
      continue;
    }
    if (key == "float") {
      cfg.floating_ = value == "true" || value == "1";
      continue;
    }
    std::istringstream fields(value);
    LayerBits bits;
    require(static_cast<bool>(fields >> bits.weight_bits), ErrorKind::kParseError,
            "bit config line " + std::to_string(line_no) + ": missing weight bits");
    int act = 0;
    if (fields >> act) bits.activation_bits = act;
    std::string extra;
    require(!(fields >> extra), ErrorKind::kParseError,
            "bit config line " + std::to_string(line_no) + ": trailing tokens");
    cfg.layers_[key] = bits;
  }
  cfg.validate();
  return cfg;
}

BitWidthConfig BitWidthConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIoError, "cannot open bit config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string BitWidthConfig::serialize() const {
  std::ostringstream out;
  out << "# layer = weight_bits [activation_bits]\n";
  out << "name = " << name_ << "\n";
  if (floating_) {
    out << "float = true\n";
    return out.str();
  }
  for (const auto& layer : superpoint::kLayers) {
    const auto it = layers_.find(std::string(layer.name));
    if (it == layers_.end()) continue;
    out << layer.name << " = " << it->second.weight_bits;
    if (it->second.activation_bits) out << " " << *it->second.activation_bits;
    out << "\n";
  }
  return out.str();
}

const LayerBits& BitWidthConfig::at(const std::string& layer) const {
  const auto it = layers_.find(layer);
  require(it != layers_.end(), ErrorKind::kInvalidConfig,
          "no bit-width assignment for layer '" + layer + "'");
  return it->second;
}

void BitWidthConfig::set(const std::string& layer, LayerBits bits) { layers_[layer] = bits; }

void BitWidthConfig::validate() const {
  if (floating_) return;
  for (const auto& [name, bits] : layers_) {
    require(superpoint::find_layer(name).has_value(), ErrorKind::kInvalidConfig,
            "unknown layer '" + name + "' in bit config");
    (void)bits;
  }
  for (const auto& layer : superpoint::kLayers) {
    const LayerBits& bits = at(std::string(layer.name));
    require(bits.weight_bits >= 2 && bits.weight_bits <= 8, ErrorKind::kInvalidConfig,
            std::string(layer.name) + ": weight bits outside [2, 8]");
    require(bits.activation_bits.has_value() == layer.relu, ErrorKind::kInvalidConfig,
            std::string(layer.name) +
                (layer.relu ? ": missing activation bits" : ": output layer takes no activation bits"));
    if (bits.activation_bits) {
      require(*bits.activation_bits >= 2 && *bits.activation_bits <= 8, ErrorKind::kInvalidConfig,
              std::string(layer.name) + ": activation bits outside [2, 8]");
    }
  }
}

}  // namespace qsp::quant
