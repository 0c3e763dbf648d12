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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qsp/io/tum.hpp"

namespace qsp::io {
namespace {

namespace fs = std::filesystem;

TEST(TumConfig, ParsesRequiredAndOptionalKeys) {
  const auto cfg = parse_sequence_config(
      "# camera\nfx = 525\nfy = 525.5\ncx = 319.5\ncy = 239.5\nk1 = 0.1\ndepth_factor = 1000\n");
  EXPECT_EQ(cfg.intrinsics.fx, 525.0);
  EXPECT_EQ(cfg.intrinsics.fy, 525.5);
  EXPECT_EQ(cfg.intrinsics.cx, 319.5);
  EXPECT_EQ(cfg.intrinsics.cy, 239.5);
  EXPECT_EQ(cfg.depth_factor, 1000.0);
}

TEST(TumConfig, MissingKeyIsParseError) {
  try {
    parse_sequence_config("fx = 1\nfy = 1\ncx = 0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("cy"), std::string::npos);
  }
}

TEST(TumLists, SkipsCommentsAndBlankLines) {
  const auto r = parse_image_list("# list\n\n1.5 rgb/a.png\n2.0 rgb/b.png\n", "rgb.txt");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].timestamp, 2.0);
  EXPECT_EQ(r[1].path, "rgb/b.png");
  EXPECT_THROW(parse_image_list("abc rgb/a.png\n", "rgb.txt"), Error);
  EXPECT_THROW(parse_image_list("1.0\n", "rgb.txt"), Error);
}

TEST(TumLists, Trajectory) {
  const auto p = parse_trajectory("1 0 0 1 0 0 0 1\n", "gt");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].translation[2], 1.0);
  EXPECT_THROW(parse_trajectory("1 0 0 1 0 0 0\n", "gt"), Error);
  EXPECT_THROW(parse_trajectory("1 0 0 1 0 0 0 0\n", "gt"), Error);
}

TEST(Associate, PairsWithinTolerance) {
  const auto pairs = associate_timestamps({1.0, 2.0, 3.0}, {1.01, 2.05, 2.99}, 0.02);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], (std::pair<std::size_t, std::size_t>{0, 0}));
  EXPECT_EQ(pairs[1], (std::pair<std::size_t, std::size_t>{2, 2}));
}

TEST(Associate, OneToOne) {
  const auto pairs = associate_timestamps({1.0, 1.01}, {1.005}, 0.02);
  ASSERT_EQ(pairs.size(), 1u);
}

TEST(Associate, IndependentOfInputOrder) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 5);
  std::vector<double> a(40), b(40);
  for (double& v : a) v = u(rng);
  for (double& v : b) v = u(rng);
  auto stamp_pairs = [](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::pair<double, double>> out;
    for (auto [i, j] : associate_timestamps(x, y, 0.05)) out.emplace_back(x[i], y[j]);
    return out;
  };
  const auto ref = stamp_pairs(a, b);
  EXPECT_FALSE(ref.empty());
  for (int t = 0; t < 5; ++t) {
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_EQ(stamp_pairs(a, b), ref);
  }
}

TEST(LoadTum, ReadsFixture) {
  const fs::path root = testing::temp_dir("tum_load");
  testing::TumFixture f;
  f.frames = 4;
  testing::write_tum(root, f);
  const auto seq = load_tum(root);
  ASSERT_EQ(seq.frames.size(), 4u);
  EXPECT_EQ(seq.dropped, 0u);
  EXPECT_EQ(seq.ground_truth.size(), 4u);
  for (const auto& fr : seq.frames) {
    EXPECT_TRUE(fr.ground_truth.has_value());
    EXPECT_TRUE(fs::exists(fr.rgb));
    EXPECT_TRUE(fs::exists(fr.depth));
  }
  EXPECT_EQ(seq.config.intrinsics.fx, f.fx);
}

TEST(LoadTum, GroundTruthIsOptional) {
  const fs::path root = testing::temp_dir("tum_nogt");
  testing::TumFixture f;
  f.ground_truth = false;
  testing::write_tum(root, f);
  const auto seq = load_tum(root);
  EXPECT_EQ(seq.frames.size(), f.frames);
  EXPECT_TRUE(seq.ground_truth.empty());
}

TEST(LoadTum, UnpairedRgbIsDropped) {
  const fs::path root = testing::temp_dir("tum_drop");
  testing::write_tum(root, testing::TumFixture{});
  testing::write_file(root / "rgb.txt",
                      testing::read_file(root / "rgb.txt") + "500.0 rgb/missing.png\n");
  const auto seq = load_tum(root);
  EXPECT_EQ(seq.dropped, 1u);
}

TEST(LoadTum, MissingListIsIoError) {
  const fs::path root = testing::temp_dir("tum_missing");
  testing::write_tum(root, testing::TumFixture{});
  fs::remove(root / "depth.txt");
  try {
    load_tum(root);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIoError);
  }
}

}  // namespace
}  // namespace qsp::io
