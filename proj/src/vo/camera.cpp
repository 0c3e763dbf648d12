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

#include "qsp/vo/camera.hpp"

#include <cmath>

namespace qsp::vo {

Eigen::Vector2d distort_normalized(const CameraIntrinsics& k, const Eigen::Vector2d& xn) {
  const double x = xn.x(), y = xn.y();
  const double r2 = x * x + y * y;
  const double radial = 1 + k.k1 * r2 + k.k2 * r2 * r2 + k.k3 * r2 * r2 * r2;
  return {x * radial + 2 * k.p1 * x * y + k.p2 * (r2 + 2 * x * x),
          y * radial + k.p1 * (r2 + 2 * y * y) + 2 * k.p2 * x * y};
}

nn::Tensor undistort(const nn::Tensor& image, const CameraIntrinsics& k, Sampling sampling) {
  require(k.fx > 0 && k.fy > 0, ErrorKind::kInvalidArgument, "focal lengths must be positive");
  if (!k.distorted()) return image;
  nn::Tensor out(image.shape(), 0.0);
  const double w = static_cast<double>(image.width());
  const double h = static_cast<double>(image.height());
  for (std::size_t v = 0; v < image.height(); ++v) {
    for (std::size_t u = 0; u < image.width(); ++u) {
      const Eigen::Vector2d d = distort_normalized(k, {(u - k.cx) / k.fx, (v - k.cy) / k.fy});
      const double sx = k.fx * d.x() + k.cx;
      const double sy = k.fy * d.y() + k.cy;
      if (sampling == Sampling::kNearest) {
        const double rx = std::round(sx), ry = std::round(sy);
        if (rx < 0 || ry < 0 || rx > w - 1 || ry > h - 1) continue;
        for (std::size_t c = 0; c < image.channels(); ++c) {
          out(c, v, u) = image(c, static_cast<std::size_t>(ry), static_cast<std::size_t>(rx));
        }
        continue;
      }
      if (sx < 0 || sy < 0 || sx > w - 1 || sy > h - 1) continue;
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
      const double fx = sx - x0, fy = sy - y0;
      for (std::size_t c = 0; c < image.channels(); ++c) {
        const double top = image(c, y0, x0) * (1 - fx) + image(c, y0, x1) * fx;
        const double bottom = image(c, y1, x0) * (1 - fx) + image(c, y1, x1) * fx;
        out(c, v, u) = top * (1 - fy) + bottom * fy;
      }
    }
  }
  return out;
}

std::optional<Eigen::Vector3d> backproject(double u, double v, double depth_raw,
                                           const CameraIntrinsics& k, double depth_factor) {
  if (!(depth_raw > 0)) return std::nullopt;
  const double z = depth_raw / depth_factor;
  return Eigen::Vector3d((u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z);
}

std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0)) return std::nullopt;
  return Eigen::Vector2d(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

}  // namespace qsp::vo
