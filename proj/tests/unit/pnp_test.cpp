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

#include <random>

#include <gtest/gtest.h>

#include "qsp/vo/camera.hpp"
#include "qsp/vo/geometry.hpp"
#include "qsp/vo/pnp.hpp"

namespace qsp::vo {
namespace {

CameraIntrinsics camera() {
  CameraIntrinsics k;
  k.fx = 525;
  k.fy = 525;
  k.cx = 319.5;
  k.cy = 239.5;
  return k;
}

struct Problem {
  PoseSE3 truth;
  std::vector<Eigen::Vector3d> p3;
  std::vector<Eigen::Vector2d> p2;
};

// Random pose with rotation up to 30 degrees and translation up to 1 m; 50
// points at 1-5 m depth that stay in front of the camera after the motion.
Problem make_problem(std::mt19937_64& rng, double noise_px) {
  std::uniform_real_distribution<double> u(-1, 1), depth(1, 5), px(0, 1);
  std::normal_distribution<double> noise(0, 1);
  Problem p;
  Eigen::Vector3d axis(u(rng), u(rng), u(rng));
  axis.normalize();
  const double angle = deg_to_rad(30 * px(rng));
  Eigen::Vector3d t(u(rng), u(rng), u(rng));
  if (t.norm() > 1) t /= t.norm();
  p.truth = PoseSE3{so3_exp(axis * angle), t * px(rng)};
  const auto k = camera();
  while (p.p3.size() < 50) {
    const double z = depth(rng);
    const Eigen::Vector3d x((640 * px(rng) - k.cx) * z / k.fx, (480 * px(rng) - k.cy) * z / k.fy, z);
    const Eigen::Vector3d y = p.truth * x;
    if (y.z() < 0.5) continue;
    auto uv = project(y, k);
    if (!uv) continue;
    *uv += Eigen::Vector2d(noise(rng), noise(rng)) * noise_px;
    p.p3.push_back(x);
    p.p2.push_back(*uv);
  }
  return p;
}

double rot_err_deg(const PoseSE3& a, const PoseSE3& b) {
  return rad_to_deg(rotation_angle(a.rotation.transpose() * b.rotation));
}

TEST(Pnp, NoiseFreeRecovery) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 100; ++t) {
    const Problem p = make_problem(rng, 0.0);
    const auto r = solve_pnp(p.p3, p.p2, camera());
    EXPECT_TRUE(r.converged) << t;
    EXPECT_LT(rot_err_deg(r.pose, p.truth), 0.01) << t;
    EXPECT_LT((r.pose.translation - p.truth.translation).norm(), 1e-3) << t;
    EXPECT_LE(r.final_cost, r.initial_cost);
  }
}

TEST(Pnp, NoisyRecovery) {
  std::mt19937_64 rng(62);
  for (int t = 0; t < 100; ++t) {
    const Problem p = make_problem(rng, 1.0);
    const auto r = solve_pnp(p.p3, p.p2, camera());
    EXPECT_LT(rot_err_deg(r.pose, p.truth), 0.5) << t;
    EXPECT_LT((r.pose.translation - p.truth.translation).norm(), 0.02) << t;
    EXPECT_GT(r.rms, 0.0);
  }
}

TEST(Pnp, HuberLossAlsoConverges) {
  std::mt19937_64 rng(63);
  const Problem p = make_problem(rng, 0.0);
  PnpOptions o;
  o.huber = true;
  const auto r = solve_pnp(p.p3, p.p2, camera(), o);
  EXPECT_LT(rot_err_deg(r.pose, p.truth), 0.01);
}

TEST(Pnp, TooFewPointsIsInsufficientMatches) {
  std::mt19937_64 rng(64);
  Problem p = make_problem(rng, 0.0);
  p.p3.resize(5);
  p.p2.resize(5);
  try {
    solve_pnp(p.p3, p.p2, camera());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientMatches);
  }
}

TEST(Pnp, CostIsZeroAtTruth) {
  std::mt19937_64 rng(65);
  const Problem p = make_problem(rng, 0.0);
  EXPECT_LT(reprojection_cost(p.truth, p.p3, p.p2, camera()), 1e-18);
}

}  // namespace
}  // namespace qsp::vo
