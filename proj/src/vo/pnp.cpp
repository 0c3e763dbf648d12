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

#include "qsp/vo/pnp.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "qsp/common/error.hpp"

namespace qsp::vo {
namespace {

constexpr double kMinDepth = 1e-6;
constexpr double kBehindPenalty = 1e6;  // squared px per point behind the camera

struct Normal {
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  Vector6d g = Vector6d::Zero();
  double cost = 0;
};

double huber_weight(double r, const PnpOptions& o) {
  return (!o.huber || r <= o.huber_delta) ? 1.0 : o.huber_delta / r;
}

double huber_cost(double r2, const PnpOptions& o) {
  if (!o.huber) return r2;
  const double r = std::sqrt(r2);
  return r <= o.huber_delta ? r2 : 2 * o.huber_delta * r - o.huber_delta * o.huber_delta;
}

double cost_of(const PoseSE3& pose, std::span<const Eigen::Vector3d> p3,
               std::span<const Eigen::Vector2d> p2, const CameraIntrinsics& k, const PnpOptions& o) {
  double cost = 0;
  for (std::size_t i = 0; i < p3.size(); ++i) {
    const Eigen::Vector3d p = pose * p3[i];
    if (p.z() <= kMinDepth) {
      cost += kBehindPenalty;
      continue;
    }
    const Eigen::Vector2d r(k.fx * p.x() / p.z() + k.cx - p2[i].x(),
                            k.fy * p.y() / p.z() + k.cy - p2[i].y());
    cost += huber_cost(r.squaredNorm(), o);
  }
  return cost;
}

Normal linearise(const PoseSE3& pose, std::span<const Eigen::Vector3d> p3,
                 std::span<const Eigen::Vector2d> p2, const CameraIntrinsics& k,
                 const PnpOptions& o) {
  Normal n;
  for (std::size_t i = 0; i < p3.size(); ++i) {
    const Eigen::Vector3d p = pose * p3[i];
    if (p.z() <= kMinDepth) {
      n.cost += kBehindPenalty;
      continue;
    }
    const double iz = 1.0 / p.z();
    const Eigen::Vector2d r(k.fx * p.x() * iz + k.cx - p2[i].x(), k.fy * p.y() * iz + k.cy - p2[i].y());
    Eigen::Matrix<double, 2, 3> dproj;
    dproj << k.fx * iz, 0, -k.fx * p.x() * iz * iz, 0, k.fy * iz, -k.fy * p.y() * iz * iz;
    // d(exp(xi) p)/dxi at 0 = [I, -[p]x].
    Eigen::Matrix<double, 3, 6> dp;
    dp.leftCols<3>().setIdentity();
    dp.rightCols<3>() = -skew(p);
    const Eigen::Matrix<double, 2, 6> j = dproj * dp;
    const double w = huber_weight(r.norm(), o);
    n.h += w * j.transpose() * j;
    n.g += w * j.transpose() * r;
    n.cost += huber_cost(r.squaredNorm(), o);
  }
  return n;
}

}  // namespace

double reprojection_cost(const PoseSE3& pose, std::span<const Eigen::Vector3d> points3d,
                         std::span<const Eigen::Vector2d> points2d, const CameraIntrinsics& k) {
  require(points3d.size() == points2d.size(), ErrorKind::kInvalidArgument,
          "point lists differ in length");
  return cost_of(pose, points3d, points2d, k, PnpOptions{});
}

PnpResult solve_pnp(std::span<const Eigen::Vector3d> points3d,
                    std::span<const Eigen::Vector2d> points2d, const CameraIntrinsics& k,
                    const PnpOptions& options) {
  require(points3d.size() == points2d.size(), ErrorKind::kInvalidArgument,
          "point lists differ in length");
  require(points3d.size() >= kMinPnpPoints, ErrorKind::kInsufficientMatches,
          "PnP needs at least 6 correspondences, got " + std::to_string(points3d.size()));
  PnpResult result;
  PoseSE3 pose = PoseSE3::identity();
  Normal n = linearise(pose, points3d, points2d, k, options);
  result.initial_cost = n.cost;
  double lambda = 1e-3;
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    if (n.g.squaredNorm() == 0) {
      result.converged = true;
      break;
    }
    Eigen::Matrix<double, 6, 6> a = n.h;
    for (int d = 0; d < 6; ++d) a(d, d) += lambda * (n.h(d, d) + 1e-12);
    const Vector6d step = a.ldlt().solve(-n.g);
    if (!step.allFinite()) break;
    const PoseSE3 candidate = se3_exp(step) * pose;
    const double cost = cost_of(candidate, points3d, points2d, k, options);
    if (cost <= n.cost) {
      pose = candidate;
      lambda = std::max(lambda / 10, 1e-12);
      n = linearise(pose, points3d, points2d, k, options);
      if (step.norm() < options.step_tolerance) {
        result.converged = true;
        break;
      }
    } else {
      lambda *= 10;
      if (lambda > 1e12) {
        // No descent direction left at this precision.
        result.converged = step.norm() < 1e-6;
        break;
      }
    }
  }
  // Re-orthonormalise accumulated rounding in the rotation.
  Eigen::Quaterniond q(pose.rotation);
  pose.rotation = q.normalized().toRotationMatrix();
  result.pose = pose;
  result.final_cost = cost_of(pose, points3d, points2d, k, options);
  result.rms = std::sqrt(reprojection_cost(pose, points3d, points2d, k) /
                         static_cast<double>(points3d.size()));
  return result;
}

}  // namespace qsp::vo
