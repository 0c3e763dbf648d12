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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qsp/vo/camera.hpp"
#include "qsp/vo/geometry.hpp"
#include "qsp/vo/matching.hpp"
#include "qsp/vo/trajectory_io.hpp"

namespace qsp::vo {
namespace {

Eigen::Matrix3d rz(double deg) {
  return Eigen::AngleAxisd(deg_to_rad(deg), Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

TEST(Geometry, RotationAngleOverFullRange) {
  for (int deg = 0; deg < 180; ++deg) {
    EXPECT_NEAR(rad_to_deg(rotation_angle(rz(deg))), deg, 1e-6) << deg;
    EXPECT_NEAR(rad_to_deg(rotation_angle(rz(-deg))), deg, 1e-6) << deg;
  }
  EXPECT_NEAR(rad_to_deg(rotation_angle(rz(180))), 180.0, 1e-6);
}

TEST(Geometry, ExpLogRoundTrip) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> n(0, 0.8);
  for (int t = 0; t < 200; ++t) {
    Vector6d xi;
    for (int i = 0; i < 6; ++i) xi[i] = n(rng);
    const PoseSE3 p = se3_exp(xi);
    EXPECT_TRUE(p.is_valid());
    EXPECT_LT((se3_log(p) - xi).norm(), 1e-9) << t;
  }
  EXPECT_LT((so3_exp(Eigen::Vector3d::Zero()) - Eigen::Matrix3d::Identity()).norm(), 1e-15);
  EXPECT_LT(so3_log(Eigen::Matrix3d::Identity()).norm(), 1e-15);
}

TEST(Geometry, SkewIsCrossProduct) {
  const Eigen::Vector3d a(1, 2, 3), b(-4, 0.5, 2);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(Geometry, ComposeAndInvert) {
  const PoseSE3 a{rz(30), Eigen::Vector3d(1, 2, 3)};
  const PoseSE3 b{rz(-75), Eigen::Vector3d(0, -1, 0.5)};
  const Eigen::Vector3d p(0.3, -0.2, 4);
  EXPECT_LT(((a * b) * p - a * (b * p)).norm(), 1e-12);
  EXPECT_LT(((a * a.inverse()).matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-12);
  EXPECT_LT((PoseSE3::from_matrix(a.matrix()).matrix() - a.matrix()).norm(), 1e-15);
}

TEST(Geometry, QuaternionRoundTrip) {
  const PoseSE3 a{rz(40) * Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitX()).toRotationMatrix(),
                  Eigen::Vector3d(1, 0, 0)};
  const auto q = a.quaternion();
  const PoseSE3 b = PoseSE3::from_quaternion(q, a.translation);
  EXPECT_LT((a.matrix() - b.matrix()).norm(), 1e-12);
  const PoseSE3 unnormalised = PoseSE3::from_quaternion({0, 0, 0, 2}, Eigen::Vector3d::Zero());
  EXPECT_TRUE(unnormalised.is_valid());
}

TEST(Geometry, EulerZyx) {
  const Eigen::Matrix3d r = rz(30) *
                            Eigen::AngleAxisd(deg_to_rad(20), Eigen::Vector3d::UnitY()).toRotationMatrix() *
                            Eigen::AngleAxisd(deg_to_rad(10), Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Vector3d e = euler_zyx(r);
  EXPECT_NEAR(rad_to_deg(e[0]), 10, 1e-9);
  EXPECT_NEAR(rad_to_deg(e[1]), 20, 1e-9);
  EXPECT_NEAR(rad_to_deg(e[2]), 30, 1e-9);
}

CameraIntrinsics camera() {
  CameraIntrinsics k;
  k.fx = 500;
  k.fy = 510;
  k.cx = 320;
  k.cy = 240;
  return k;
}

TEST(Camera, BackprojectProjectRoundTrip) {
  const auto p = backproject(100.5, 50.25, 10000, camera());
  ASSERT_TRUE(p.has_value());
  EXPECT_DOUBLE_EQ(p->z(), 2.0);
  const auto uv = project(*p, camera());
  ASSERT_TRUE(uv.has_value());
  EXPECT_NEAR(uv->x(), 100.5, 1e-12);
  EXPECT_NEAR(uv->y(), 50.25, 1e-12);
  EXPECT_FALSE(backproject(1, 1, 0, camera()).has_value());
  EXPECT_FALSE(project(Eigen::Vector3d(0, 0, -1), camera()).has_value());
}

TEST(Camera, UndistortWithoutCoefficientsIsIdentity) {
  const nn::Tensor img = testing::texture(24, 32, 2);
  EXPECT_EQ(undistort(img, camera()), img);
}

TEST(Camera, UndistortInvertsForwardModel) {
  CameraIntrinsics k;
  k.fx = k.fy = 40;
  k.cx = 31.5;
  k.cy = 23.5;
  k.k1 = 0.05;
  // A distorted image whose value at each pixel is the undistorted x
  // coordinate; after undistortion every pixel should read its own x.
  nn::Tensor distorted({1, 48, 64});
  for (std::size_t y = 0; y < 48; ++y) {
    for (std::size_t x = 0; x < 64; ++x) {
      // Brute-force inverse of the forward model by fixed-point iteration.
      Eigen::Vector2d target((x - k.cx) / k.fx, (y - k.cy) / k.fy), xn = target;
      for (int it = 0; it < 50; ++it) xn += target - distort_normalized(k, xn);
      distorted(0, y, x) = xn.x() * k.fx + k.cx;
    }
  }
  const nn::Tensor out = undistort(distorted, k, Sampling::kBilinear);
  for (std::size_t y = 10; y < 38; ++y) {
    for (std::size_t x = 10; x < 54; ++x) {
      EXPECT_NEAR(out(0, y, x), static_cast<double>(x), 0.05) << x << "," << y;
    }
  }
}

superpoint::DetectionResult with_descriptors(const std::vector<std::vector<double>>& d) {
  superpoint::DetectionResult r;
  for (std::size_t i = 0; i < d.size(); ++i) {
    r.keypoints.push_back({double(i), 0, 1});
    std::vector<double> full(superpoint::kDescriptorDim, 0.0);
    std::copy(d[i].begin(), d[i].end(), full.begin());
    r.descriptors.insert(r.descriptors.end(), full.begin(), full.end());
  }
  return r;
}

TEST(Matching, MutualNearestNeighbours) {
  const auto a = with_descriptors({{1, 0}, {0, 1}, {0.8, 0.6}});
  const auto b = with_descriptors({{0, 1}, {1, 0}});
  const auto m = match(a, b, 0.0);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (Match{0, 1, 1.0}));
  EXPECT_EQ(m[1], (Match{1, 0, 1.0}));
}

TEST(Matching, SimilarityThreshold) {
  const auto a = with_descriptors({{1, 0}});
  const auto b = with_descriptors({{0.6, 0.8}});
  EXPECT_EQ(match(a, b, 0.7).size(), 0u);
  EXPECT_EQ(match(a, b, 0.5).size(), 1u);
  EXPECT_EQ(match(a, superpoint::DetectionResult{}, 0.0).size(), 0u);
}

TEST(Matching, TiesGoToLowerIndex) {
  const auto a = with_descriptors({{1, 0}});
  const auto b = with_descriptors({{1, 0}, {1, 0}});
  const auto m = match(a, b, 0.0);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].curr, 0u);
}

TEST(TrajectoryIo, RoundTripIsExact) {
  Trajectory t;
  t.append(1305031102.175304, PoseSE3{rz(12.5), Eigen::Vector3d(0.1, -2.0 / 3.0, 1e-7)}, 0);
  t.append(1305031102.211214, PoseSE3::identity(), 1);
  const auto back = parse_tum_trajectory(format_tum_trajectory(t));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].timestamp, t[i].timestamp);
    EXPECT_LT((back[i].pose.matrix() - t[i].pose.matrix()).norm(), 1e-12);
  }
  EXPECT_EQ(std::stod(format_number(0.1)), 0.1);
}

TEST(TrajectoryIo, TimestampsMustIncrease) {
  Trajectory t;
  t.append(1.0, PoseSE3::identity(), 0);
  EXPECT_THROW(t.append(1.0, PoseSE3::identity(), 1), Error);
}

}  // namespace
}  // namespace qsp::vo
