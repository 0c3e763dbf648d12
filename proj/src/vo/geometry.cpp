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

#include "qsp/vo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsp/common/error.hpp"

namespace qsp::vo {

PoseSE3 PoseSE3::from_matrix(const Eigen::Matrix4d& m) {
  PoseSE3 p;
  p.rotation = m.topLeftCorner<3, 3>();
  p.translation = m.topRightCorner<3, 1>();
  return p;
}

PoseSE3 PoseSE3::from_quaternion(const std::array<double, 4>& xyzw, const Eigen::Vector3d& t) {
  Eigen::Quaterniond q(xyzw[3], xyzw[0], xyzw[1], xyzw[2]);
  require(q.norm() > 0, ErrorKind::kInvalidArgument, "zero quaternion");
  q.normalize();
  PoseSE3 p;
  p.rotation = q.toRotationMatrix();
  p.translation = t;
  return p;
}

PoseSE3 PoseSE3::operator*(const PoseSE3& other) const {
  PoseSE3 p;
  p.rotation = rotation * other.rotation;
  p.translation = rotation * other.translation + translation;
  return p;
}

PoseSE3 PoseSE3::inverse() const {
  PoseSE3 p;
  p.rotation = rotation.transpose();
  p.translation = -(p.rotation * translation);
  return p;
}

Eigen::Matrix4d PoseSE3::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

std::array<double, 4> PoseSE3::quaternion() const {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  return {q.x(), q.y(), q.z(), q.w()};
}

bool PoseSE3::is_valid(double tol) const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  return (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol && translation.allFinite();
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) return Eigen::Matrix3d::Identity() + skew(omega);
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

namespace {

// Left Jacobian of SO(3).
Eigen::Matrix3d left_jacobian(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);
  if (theta < 1e-8) return Eigen::Matrix3d::Identity() + 0.5 * w;
  const double t2 = theta * theta;
  return Eigen::Matrix3d::Identity() + (1 - std::cos(theta)) / t2 * w +
         (theta - std::sin(theta)) / (t2 * theta) * w * w;
}

}  // namespace

PoseSE3 se3_exp(const Vector6d& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d omega = xi.tail<3>();
  PoseSE3 p;
  p.rotation = so3_exp(omega);
  p.translation = left_jacobian(omega) * rho;
  return p;
}

Vector6d se3_log(const PoseSE3& pose) {
  const Eigen::Vector3d omega = so3_log(pose.rotation);
  Vector6d xi;
  xi.head<3>() = left_jacobian(omega).inverse() * pose.translation;
  xi.tail<3>() = omega;
  return xi;
}

double rotation_angle(const Eigen::Matrix3d& rotation) {
  const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

Eigen::Vector3d euler_zyx(const Eigen::Matrix3d& r) {
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double roll, yaw;
  if (std::abs(r(2, 0)) < 1.0 - 1e-12) {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: only roll +- yaw is observable; put it all in yaw.
    roll = 0;
    yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return {roll, pitch, yaw};
}

double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace qsp::vo
