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
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qsp/nn/tensor.hpp"

namespace qsp::testing {

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

/// Gray background with random rectangles, values in [0, 1] on 8-bit levels.
nn::Tensor texture(std::size_t height, std::size_t width, std::uint64_t seed,
                   std::size_t rectangles = 40);

/// out(q) = image(h^-1 q), bilinear, 0 outside.
nn::Tensor warp(const nn::Tensor& image, const Eigen::Matrix3d& h);

/// Random mild homography: rotation, scale, translation and perspective.
Eigen::Matrix3d random_homography(std::uint64_t seed, double width, double height);

/// HPatches layout: <root>/<name>/{1..6}.ppm and H_1_2 .. H_1_6.
void write_hpatches(const std::filesystem::path& root, std::size_t sequences, std::size_t height,
                    std::size_t width, std::uint64_t seed);

struct TumFixture {
  std::size_t frames = 3;
  std::size_t width = 64;
  std::size_t height = 48;
  std::size_t shift_px = 0;  // image shift per frame; 0 gives a static camera
  double depth_m = 2.0;
  double fx = 50.0;
  double t0 = 100.0;
  double dt = 0.1;
  std::uint64_t seed = 0;
  bool ground_truth = true;
};

/// Fronto-parallel textured plane seen by a camera translating along +x.
/// Writes rgb/, depth/, rgb.txt, depth.txt, groundtruth.txt and camera.cfg.
void write_tum(const std::filesystem::path& root, const TumFixture& f);

/// Camera x position of frame i in metres.
double tum_camera_x(const TumFixture& f, std::size_t i);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qsp::testing
