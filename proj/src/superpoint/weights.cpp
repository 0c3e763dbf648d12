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

#include "qsp/superpoint/weights.hpp"

#include <cmath>
#include <random>
#include <set>

#include "qsp/io/archive.hpp"
#include "qsp/superpoint/architecture.hpp"

namespace qsp::superpoint {

const nn::ConvSpec& SuperPointWeights::at(const std::string& layer) const {
  const auto it = layers.find(layer);
  require(it != layers.end(), ErrorKind::kInvalidArgument, "no weights for layer " + layer);
  return it->second;
}

void SuperPointWeights::validate() const {
  for (const auto& spec : kLayers) {
    const std::string name(spec.name);
    const auto& conv = at(name);
    require(conv.in_channels == spec.in_channels && conv.out_channels == spec.out_channels &&
                conv.kernel == spec.kernel,
            ErrorKind::kInvalidArgument, "layer " + name + " has the wrong shape");
    conv.validate();
  }
}

SuperPointWeights random_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuperPointWeights weights;
  for (const auto& spec : kLayers) {
    nn::ConvSpec conv;
    conv.in_channels = spec.in_channels;
    conv.out_channels = spec.out_channels;
    conv.kernel = spec.kernel;
    const double fan_in = static_cast<double>(spec.in_channels * spec.kernel * spec.kernel);
    std::normal_distribution<double> he(0.0, std::sqrt(2.0 / fan_in));
    std::normal_distribution<double> small(0.0, 0.01);
    conv.weights.resize(spec.out_channels * spec.in_channels * spec.kernel * spec.kernel);
    for (double& w : conv.weights) w = static_cast<float>(he(rng));
    conv.bias.resize(spec.out_channels);
    for (double& b : conv.bias) b = static_cast<float>(small(rng));
    weights.layers.emplace(std::string(spec.name), std::move(conv));
  }
  return weights;
}

SuperPointWeights load_weights(const std::filesystem::path& dir, std::vector<std::string>* warnings) {
  const io::Archive archive = io::read_archive(dir);
  SuperPointWeights weights;
  std::set<std::string> known;
  for (const auto& spec : kLayers) {
    const std::string layer(spec.name);
    const std::string wname = layer + ".weight";
    const std::string bname = layer + ".bias";
    known.insert(wname);
    known.insert(bname);
    const auto* w = archive.find(wname);
    const auto* b = archive.find(bname);
    require(w != nullptr, ErrorKind::kArchiveError, "archive lacks tensor " + wname);
    require(b != nullptr, ErrorKind::kArchiveError, "archive lacks tensor " + bname);
    const std::vector<std::size_t> wshape{spec.out_channels, spec.in_channels, spec.kernel,
                                          spec.kernel};
    require(w->shape == wshape, ErrorKind::kArchiveError, "tensor " + wname + " has the wrong shape");
    require(b->shape == std::vector<std::size_t>{spec.out_channels}, ErrorKind::kArchiveError,
            "tensor " + bname + " has the wrong shape");
    nn::ConvSpec conv{spec.in_channels, spec.out_channels, spec.kernel, w->values, b->values};
    for (double v : conv.weights) {
      require(std::isfinite(v), ErrorKind::kArchiveError, "tensor " + wname + " is not finite");
    }
    weights.layers.emplace(layer, std::move(conv));
  }
  for (const auto& t : archive.tensors) {
    if (!known.count(t.name) && warnings) warnings->push_back("ignoring unknown tensor " + t.name);
  }
  return weights;
}

void store_weights(const std::filesystem::path& dir, const SuperPointWeights& weights,
                   const std::map<std::string, std::string>& metadata) {
  weights.validate();
  io::Archive archive;
  archive.metadata = metadata;
  for (const auto& spec : kLayers) {
    const std::string layer(spec.name);
    const auto& conv = weights.at(layer);
    archive.tensors.push_back({layer + ".weight",
                               {conv.out_channels, conv.in_channels, conv.kernel, conv.kernel},
                               io::ElementType::kF32,
                               conv.weights});
    archive.tensors.push_back({layer + ".bias", {conv.out_channels}, io::ElementType::kF32, conv.bias});
  }
  io::write_archive(dir, archive);
}

}  // namespace qsp::superpoint
