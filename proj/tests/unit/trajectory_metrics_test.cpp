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

#include "oracles.hpp"
#include "qsp/eval/trajectory_metrics.hpp"
#include "qsp/vo/geometry.hpp"

namespace qsp::eval {
namespace {

using testing::ScalarPose;

vo::PoseSE3 to_pose(const ScalarPose& s) {
  vo::PoseSE3 p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = s.r[r][c];
    p.translation[r] = s.t[r];
  }
  return p;
}

vo::Trajectory trajectory(const std::vector<double>& times, const std::vector<ScalarPose>& poses) {
  vo::Trajectory t;
  for (std::size_t i = 0; i < times.size(); ++i) t.append(times[i], to_pose(poses[i]), i);
  return t;
}

std::vector<ScalarPose> random_path(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<ScalarPose> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(testing::rot_axis({u(rng), u(rng), u(rng)}, 40 * u(rng), {u(rng), u(rng), u(rng)}));
  }
  return out;
}

TEST(Associate, OffsetsWithinAndBeyondTolerance) {
  const std::vector<double> t{1.0, 2.0, 3.0};
  const auto path = random_path(3, 1);
  const auto gt = trajectory(t, path);
  const auto near = trajectory({1.01, 2.01, 3.01}, path);
  EXPECT_EQ(associate(near, gt).size(), 3u);
  const auto far = trajectory({1.05, 2.05, 3.05}, path);
  try {
    associate(far, gt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUndefinedMetric);
  }
}

TEST(Ape, IdenticalIsExactlyZero) {
  const std::vector<double> t{0, 0.5, 1, 1.5, 2};
  const auto gt = trajectory(t, random_path(5, 2));
  const auto e = ape(gt, gt);
  EXPECT_EQ(e.rot_deg, 0.0);
  EXPECT_EQ(e.trans, 0.0);
  EXPECT_EQ(e.count, 5u);
  const auto r = rpe(gt, gt, 1.0);
  EXPECT_EQ(r.rot_deg, 0.0);
  EXPECT_EQ(r.trans, 0.0);
}

TEST(Ape, TranslationOffset) {
  const std::vector<double> t{0, 1, 2};
  const std::vector<ScalarPose> gt(3);
  std::vector<ScalarPose> est(3);
  for (auto& p : est) p.t = {0.1, 0, 0};
  const auto e = ape(trajectory(t, est), trajectory(t, gt));
  EXPECT_NEAR(e.trans, 0.1, 1e-15);
  EXPECT_EQ(e.rot_deg, 0.0);
}

TEST(Ape, RotationOffset) {
  const std::vector<double> t{0, 1, 2};
  const std::vector<ScalarPose> gt(3);
  const std::vector<ScalarPose> est(3, testing::rot_z(2.5));
  EXPECT_NEAR(ape(trajectory(t, est), trajectory(t, gt)).rot_deg, 2.5, 1e-9);
}

TEST(Ape, NeedsTwoPairs) {
  const auto one = trajectory({1.0}, random_path(1, 3));
  EXPECT_THROW(ape(one, one), Error);
}

TEST(Metrics, GlobalLeftOffset) {
  std::vector<double> t;
  for (int i = 0; i < 12; ++i) t.push_back(0.25 * i);
  const auto gt = random_path(12, 4);
  const ScalarPose offset = testing::rot_z(0, {0.3, -0.4, 1.2});
  std::vector<ScalarPose> est;
  for (const auto& p : gt) est.push_back(testing::compose(offset, p));
  const auto r = rpe(trajectory(t, est), trajectory(t, gt), 1.0);
  EXPECT_LT(r.rot_deg, 1e-6);
  EXPECT_LT(r.trans, 1e-12);
  const auto a = ape(trajectory(t, est), trajectory(t, gt));
  EXPECT_NEAR(a.trans, std::sqrt(0.09 + 0.16 + 1.44), 1e-12);
  EXPECT_LT(a.rot_deg, 1e-6);
}

TEST(Metrics, RotatedLeftOffsetLeavesRpeZero) {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.3 * i);
  const auto gt = random_path(10, 5);
  const ScalarPose offset = testing::rot_axis({1, 2, 3}, 25, {1, 0, -1});
  std::vector<ScalarPose> est;
  for (const auto& p : gt) est.push_back(testing::compose(offset, p));
  const auto r = rpe(trajectory(t, est), trajectory(t, gt), 0.5);
  EXPECT_LT(r.rot_deg, 1e-5);
  EXPECT_LT(r.trans, 1e-12);
}

TEST(Metrics, MatchScalarOracleOnThreePoses) {
  const std::vector<double> t{0.0, 1.0, 2.0};
  const auto gt = random_path(3, 6);
  const auto est = random_path(3, 7);
  const auto want_ape = testing::ape_oracle(est, gt);
  const auto want_rpe = testing::rpe_oracle(t, est, gt, 1.0);
  const auto got_ape = ape(trajectory(t, est), trajectory(t, gt));
  const auto got_rpe = rpe(trajectory(t, est), trajectory(t, gt), 1.0);
  EXPECT_NEAR(got_ape.rot_deg, want_ape.rot_deg, 1e-10);
  EXPECT_NEAR(got_ape.trans, want_ape.trans, 1e-10);
  EXPECT_NEAR(got_rpe.rot_deg, want_rpe.rot_deg, 1e-10);
  EXPECT_NEAR(got_rpe.trans, want_rpe.trans, 1e-10);
  EXPECT_EQ(got_rpe.count, 2u);
}

TEST(Metrics, MatchScalarOracleOnLongerPaths) {
  std::vector<double> t;
  for (int i = 0; i < 30; ++i) t.push_back(0.1 * i);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto gt = random_path(30, 10 + s);
    const auto est = random_path(30, 20 + s);
    for (double delta : {0.1, 0.55, 1.0}) {
      const auto want = testing::rpe_oracle(t, est, gt, delta);
      const auto got = rpe(trajectory(t, est), trajectory(t, gt), delta);
      EXPECT_NEAR(got.rot_deg, want.rot_deg, 1e-9);
      EXPECT_NEAR(got.trans, want.trans, 1e-9);
    }
  }
}

TEST(Rpe, NoPairFarEnoughApartIsUndefined) {
  const auto tr = trajectory({0.0, 0.5}, random_path(2, 8));
  try {
    rpe(tr, tr, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUndefinedMetric);
  }
}

TEST(AngleTraces, ZyxDegrees) {
  const std::vector<double> t{0, 1};
  const std::vector<ScalarPose> est{testing::rot_z(10), testing::rot_z(-20)};
  const std::vector<ScalarPose> gt{testing::rot_axis({1, 0, 0}, 5), ScalarPose{}};
  const auto s = angle_traces(trajectory(t, est), trajectory(t, gt));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0].est_yaw, 10, 1e-9);
  EXPECT_NEAR(s[1].est_yaw, -20, 1e-9);
  EXPECT_NEAR(s[0].gt_roll, 5, 1e-9);
  EXPECT_NEAR(s[0].gt_pitch, 0, 1e-9);
}

}  // namespace
}  // namespace qsp::eval
