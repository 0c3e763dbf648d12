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

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace qsp::vo {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Rigid transform x -> R x + t.
struct PoseSE3 {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static PoseSE3 identity() { return {}; }
  static PoseSE3 from_matrix(const Eigen::Matrix4d& m);
  /// Hamilton quaternion (x, y, z, w); normalised before use.
  static PoseSE3 from_quaternion(const std::array<double, 4>& xyzw, const Eigen::Vector3d& t);

  PoseSE3 operator*(const PoseSE3& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  PoseSE3 inverse() const;
  Eigen::Matrix4d matrix() const;
  std::array<double, 4> quaternion() const;

  /// R^T R = I and det R = 1 within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation);

/// xi = (rho, omega); the translation part uses the SE(3) left Jacobian.
PoseSE3 se3_exp(const Vector6d& xi);
Vector6d se3_log(const PoseSE3& pose);

/// Rotation angle in radians, arccos((trace - 1) / 2) with the argument
/// clamped to [-1, 1].
double rotation_angle(const Eigen::Matrix3d& rotation);

/// (roll, pitch, yaw) in radians for R = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Vector3d euler_zyx(const Eigen::Matrix3d& rotation);

double rad_to_deg(double rad);
double deg_to_rad(double deg);

}  // namespace qsp::vo
