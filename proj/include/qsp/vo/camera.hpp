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

#include <optional>

#include <Eigen/Core>

#include "qsp/nn/tensor.hpp"
#include "qsp/vo/intrinsics.hpp"

namespace qsp::vo {

/// Forward radial-tangential model on normalised coordinates.
Eigen::Vector2d distort_normalized(const CameraIntrinsics& k, const Eigen::Vector2d& xn);

enum class Sampling { kBilinear, kNearest };

/// For each output pixel, finds its distorted source through the forward
/// model and samples the input there; sources outside the image give 0.
/// Zero coefficients return the input unchanged.
nn::Tensor undistort(const nn::Tensor& image, const CameraIntrinsics& k,
                     Sampling sampling = Sampling::kBilinear);

/// Metric point for pixel (u, v) with raw depth; nullopt when the depth is 0.
std::optional<Eigen::Vector3d> backproject(double u, double v, double depth_raw,
                                           const CameraIntrinsics& k, double depth_factor = 5000.0);

/// Pinhole projection (no distortion); nullopt for points with z <= 0.
std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p, const CameraIntrinsics& k);

}  // namespace qsp::vo
