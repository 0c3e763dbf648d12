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
#include "qsp/quant/thresholds.hpp"

namespace qsp::quant {
namespace {

std::vector<double> values(const ThresholdSet& t) { return t.values; }

ThresholdSet single_row(std::vector<double> t) {
  ThresholdSet s;
  s.rows = 1;
  s.count = t.size();
  s.values = std::move(t);
  return s;
}

TEST(QuantToThresholds, Examples) {
  EXPECT_EQ(values(quant_to_thresholds(QuantParams::unsigned_tensor(2, 1.0))),
            (std::vector<double>{0.5, 1.5, 2.5}));
  EXPECT_EQ(values(quant_to_thresholds(QuantParams::unsigned_tensor(1, 0.5))),
            (std::vector<double>{0.25}));
  const auto t = quant_to_thresholds(QuantParams::unsigned_tensor(2, 1.0));
  EXPECT_EQ(apply_thresholds(nn::Tensor({1, 1, 1}, -3.0), t).values.values()[0], 0);
}

TEST(QuantToThresholds, SignedRejected) {
  EXPECT_THROW(quant_to_thresholds(QuantParams::signed_tensor(4, 1.0)), Error);
}

TEST(ApplyThresholds, Examples) {
  const auto t = single_row({0.25, 0.75, 1.25});
  EXPECT_EQ(threshold_level(t.row(0), 0.7), 1);
  EXPECT_EQ(threshold_level(t.row(0), 0.1), 0);
  EXPECT_EQ(threshold_level(t.row(0), 9.0), 3);
  EXPECT_EQ(threshold_level(t.row(0), 0.75), 2);  // x >= t counts
}

TEST(ApplyThresholds, UnsortedRowRejected) {
  EXPECT_THROW(apply_thresholds(nn::Tensor({1, 1, 1}), single_row({1.0, 0.5})), Error);
}

TEST(ApplyThresholds, MatchesReluQuantize) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> scale(1e-3, 4.0), u(-1.0, 1.0);
  std::uniform_int_distribution<int> bits(1, 8);
  for (int trial = 0; trial < 20000; ++trial) {
    const int b = bits(rng);
    const double s = scale(rng);
    const auto t = quant_to_thresholds(QuantParams::unsigned_tensor(b, s));
    const double x = u(rng) * s * std::ldexp(1.0, b + 1);
    ASSERT_EQ(threshold_level(t.row(0), x), testing::relu_quant_oracle(x, s, b)) << x << " " << s;
  }
}

TEST(ApplyThresholds, Monotone) {
  const auto t = quant_to_thresholds(QuantParams::unsigned_tensor(4, 0.3));
  std::int64_t prev = 0;
  for (double x = -1; x < 6; x += 0.001) {
    const auto level = threshold_level(t.row(0), x);
    ASSERT_GE(level, prev);
    prev = level;
  }
}

TEST(ApplyThresholds, PerChannelRows) {
  ThresholdSet t;
  t.rows = 2;
  t.count = 1;
  t.values = {0.5, 10.0};
  const auto q = apply_thresholds(nn::Tensor({2, 1, 1}, 1.0), t);
  EXPECT_EQ(q.values.data(), (std::vector<std::int64_t>{1, 0}));
}

TEST(AbsorbAffine, Examples) {
  const auto t = single_row({1, 3, 5});
  const std::vector<double> one{1}, zero{0}, two{2}, b1{1};
  EXPECT_EQ(values(absorb_affine(t, one, zero)), t.values);
  const auto shifted = values(absorb_affine(t, two, b1));
  const std::vector<double> expected{0, 1, 2};
  ASSERT_EQ(shifted.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(shifted[i], expected[i], 1e-15);
    // Exact boundary of x -> 2x + 1 under double rounding.
    EXPECT_GE(2.0 * shifted[i] + 1.0, t.values[i]);
    EXPECT_LT(2.0 * std::nextafter(shifted[i], -1e300) + 1.0, t.values[i]);
  }
  const std::vector<double> half{0.5}, m1{-1};
  EXPECT_EQ(values(absorb_affine(single_row({0}), half, m1)), (std::vector<double>{2}));
}

TEST(AbsorbAffine, NonPositiveScaleRejected) {
  const std::vector<double> zero{0}, neg{-1}, b{0};
  for (const auto& a : {zero, neg}) {
    try {
      absorb_affine(single_row({1}), a, b);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kUnsupportedTransform);
    }
  }
}

TEST(AbsorbAffine, CommutesWithThresholding) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.01, 5.0);
  for (int trial = 0; trial < 20000; ++trial) {
    std::vector<double> tv(4);
    for (double& v : tv) v = u(rng);
    std::sort(tv.begin(), tv.end());
    const auto t = single_row(tv);
    const std::vector<double> a{pos(rng)}, b{u(rng)};
    const auto absorbed = absorb_affine(t, a, b);
    ASSERT_TRUE(std::is_sorted(absorbed.values.begin(), absorbed.values.end()));
    const double x = u(rng);
    ASSERT_EQ(threshold_level(absorbed.row(0), x), testing::count_le(tv, a[0] * x + b[0]));
  }
}

}  // namespace
}  // namespace qsp::quant
