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

#include <map>
#include <optional>
#include <string>

namespace qsp::quant {

struct LayerBits {
  int weight_bits = 8;
  /// Width of the activation quantiser on this layer's ReLU output; absent for
  /// the head output convolutions, which have no activation.
  std::optional<int> activation_bits;

  bool operator==(const LayerBits&) const = default;
};

/// Per-layer bit widths for the SuperPoint convolutions, or the floating-point
/// reference when `is_float()`.
class BitWidthConfig {
 public:
  static BitWidthConfig floating();
  static BitWidthConfig uniform(const std::string& name, int bits);
  static BitWidthConfig int8() { return uniform("int8", 8); }
  static BitWidthConfig int4() { return uniform("int4", 4); }
  static BitWidthConfig int3() { return uniform("int3", 3); }
  /// 4 bits for conv1a and for the last ReLU + convolution of each head,
  /// 2 bits everywhere else.
  static BitWidthConfig mixed424();

  /// Preset name (fp, int8, int4, int3, mixed424) or a path to a config file.
  static BitWidthConfig from_option(const std::string& option);
  static BitWidthConfig parse(const std::string& text);
  static BitWidthConfig load(const std::string& path);

  std::string serialize() const;

  bool is_float() const { return floating_; }
  const std::string& name() const { return name_; }
  const std::map<std::string, LayerBits>& layers() const { return layers_; }
  /// Throws invalid-config when the layer has no assignment.
  const LayerBits& at(const std::string& layer) const;

  void set(const std::string& layer, LayerBits bits);
  /// Every SuperPoint layer assigned, widths within [2, 8], activation widths
  /// present exactly on ReLU layers.
  void validate() const;

  bool operator==(const BitWidthConfig&) const = default;

 private:
  std::string name_;
  bool floating_ = false;
  std::map<std::string, LayerBits> layers_;
};

}  // namespace qsp::quant
