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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qsp/nn/ops.hpp"

namespace qsp::superpoint {

/// Convolution parameters for every layer in kLayers, keyed by layer name.
struct SuperPointWeights {
  std::map<std::string, nn::ConvSpec> layers;

  const nn::ConvSpec& at(const std::string& layer) const;
  /// Every layer present with the channel counts and kernel of kLayers.
  void validate() const;
};

/// He-normal weights and small biases, rounded to float precision so they
/// survive an f32 archive round trip.
SuperPointWeights random_weights(std::uint64_t seed);

/// Archive tensors are `<layer>.weight` (out, in, k, k) and `<layer>.bias`
/// (out), f32. Unknown tensors are reported through `warnings`.
SuperPointWeights load_weights(const std::filesystem::path& dir,
                               std::vector<std::string>* warnings = nullptr);
void store_weights(const std::filesystem::path& dir, const SuperPointWeights& weights,
                   const std::map<std::string, std::string>& metadata = {});

}  // namespace qsp::superpoint
