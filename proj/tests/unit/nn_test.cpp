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
#include "qsp/nn/ops.hpp"

namespace qsp::nn {
namespace {

ConvSpec make_conv(std::size_t in, std::size_t out, std::size_t k, double w, double b) {
  return {in, out, k, std::vector<double>(in * out * k * k, w), std::vector<double>(out, b)};
}

TEST(Conv2d, IdentityKernel) {
  const Tensor x({1, 1, 1}, std::vector<double>{2.0});
  EXPECT_EQ(conv2d(x, make_conv(1, 1, 1, 1.0, 0.0)).values()[0], 2.0);
}

TEST(Conv2d, OnesKernelCountsNeighbours) {
  const Tensor y = conv2d(Tensor({1, 3, 3}, 1.0), make_conv(1, 1, 3, 1.0, 0.0));
  EXPECT_EQ(y(0, 1, 1), 9.0);
  EXPECT_EQ(y(0, 0, 1), 6.0);
  EXPECT_EQ(y(0, 1, 2), 6.0);
  EXPECT_EQ(y(0, 0, 0), 4.0);
  EXPECT_EQ(y(0, 2, 2), 4.0);
}

TEST(Conv2d, ZeroWeightsGiveBias) {
  const Tensor y = conv2d(Tensor({2, 5, 4}, 3.0), make_conv(2, 3, 3, 0.0, -1.5));
  for (double v : y.values()) EXPECT_EQ(v, -1.5);
}

TEST(Conv2d, ChannelMismatchIsInvalidArgument) {
  try {
    conv2d(Tensor({2, 4, 4}), make_conv(3, 1, 3, 1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(Conv2d, MatchesDirectSummation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  for (std::size_t k : {1u, 3u}) {
    ConvSpec spec = make_conv(5, 7, k, 0.0, 0.0);
    for (double& w : spec.weights) w = n(rng);
    for (double& b : spec.bias) b = n(rng);
    Tensor x({5, 11, 13});
    for (double& v : x.values()) v = n(rng);
    const Tensor got = conv2d(x, spec);
    const Tensor want = testing::conv_oracle(x, spec);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.values()[i], want.values()[i], 1e-12);
  }
}

TEST(Conv2d, IntegerPathIsExact) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> w(-127, 127), a(0, 255);
  IntConvSpec spec{16, 4, 3, std::vector<std::int32_t>(16 * 4 * 9), std::vector<std::int64_t>(4)};
  for (auto& v : spec.weights) v = w(rng);
  for (auto& v : spec.bias) v = w(rng) * 1000;
  IntTensor x({16, 6, 7});
  for (auto& v : x.values()) v = a(rng);
  const IntTensor y = conv2d(x, spec);
  for (std::size_t o = 0; o < 4; ++o)
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 7; ++c) {
        std::int64_t acc = spec.bias[o];
        for (std::size_t i = 0; i < 16; ++i)
          for (int ky = -1; ky <= 1; ++ky)
            for (int kx = -1; kx <= 1; ++kx) {
              const long yy = static_cast<long>(r) + ky, xx = static_cast<long>(c) + kx;
              if (yy < 0 || xx < 0 || yy >= 6 || xx >= 7) continue;
              acc += static_cast<std::int64_t>(spec.weights[((o * 16 + i) * 3 + (ky + 1)) * 3 + (kx + 1)]) *
                     x(i, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
            }
        ASSERT_EQ(y(o, r, c), acc);
      }
}

TEST(Conv2d, WideIntegersFallBackToDirectLoop) {
  IntConvSpec spec{1, 1, 1, {1 << 30}, {0}};
  IntTensor x({1, 1, 2}, std::vector<std::int64_t>{std::int64_t{1} << 30, 3});
  const IntTensor y = conv2d(x, spec);
  EXPECT_EQ(y(0, 0, 0), std::int64_t{1} << 60);
  EXPECT_EQ(y(0, 0, 1), std::int64_t{3} << 30);
}

TEST(MaxPool, Examples) {
  EXPECT_EQ(maxpool2x2(Tensor({1, 2, 2}, std::vector<double>{1, 2, 3, 4})).values()[0], 4.0);
  EXPECT_EQ(maxpool2x2(Tensor({1, 2, 2}, std::vector<double>{-1, -2, -3, -4})).values()[0], -1.0);
  const Tensor c = maxpool2x2(Tensor({3, 4, 6}, 2.5));
  EXPECT_EQ(c.shape(), (Shape{3, 2, 3}));
  for (double v : c.values()) EXPECT_EQ(v, 2.5);
}

TEST(MaxPool, OddSizeRejected) {
  EXPECT_THROW(maxpool2x2(Tensor({1, 3, 4})), Error);
}

TEST(Relu, Examples) {
  EXPECT_EQ(relu(Tensor({1, 1, 3}, std::vector<double>{-1, 0, 2})).data(),
            (std::vector<double>{0, 0, 2}));
  EXPECT_EQ(relu(Tensor({1, 1, 2}, std::vector<double>{1, 3})).data(), (std::vector<double>{1, 3}));
  EXPECT_EQ(relu(Tensor({1, 1, 2}, std::vector<double>{-1, -3})).data(), (std::vector<double>{0, 0}));
}

TEST(Softmax, UniformInput) {
  const Tensor y = softmax_channels(Tensor({65, 2, 2}, 0.7));
  for (double v : y.values()) EXPECT_NEAR(v, 1.0 / 65, 1e-15);
}

TEST(Softmax, ClosedFormE) {
  const Tensor y = softmax_channels(Tensor({2, 1, 1}, std::vector<double>{0, std::log(3.0)}));
  EXPECT_NEAR(y.values()[0], 0.25, 1e-15);
  EXPECT_NEAR(y.values()[1], 0.75, 1e-15);
}

TEST(Softmax, FixedBase2) {
  const Tensor y = softmax_channels(Tensor({2, 1, 1}, std::vector<double>{0, 1}),
                                    SoftmaxMode::fixed_base2());
  EXPECT_NEAR(y.values()[0], 1.0 / 3, 1e-12);
  EXPECT_NEAR(y.values()[1], 2.0 / 3, 1e-12);
}

TEST(DepthToSpace, BlockOneIsIdentity) {
  Tensor x({3, 2, 2});
  for (std::size_t i = 0; i < x.size(); ++i) x.values()[i] = static_cast<double>(i);
  EXPECT_EQ(depth_to_space(x, 1), x);
}

TEST(DepthToSpace, OneHotChannelNine) {
  Tensor x({64, 1, 1});
  x(9, 0, 0) = 1;
  const Tensor y = depth_to_space(x, 8);
  ASSERT_EQ(y.shape(), (Shape{1, 8, 8}));
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(y(0, r, c), (r == 1 && c == 1) ? 1.0 : 0.0);
}

TEST(DepthToSpace, InterleavesColumns) {
  // Channel k holds 10k + j at column j.
  Tensor x({4, 1, 2});
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t j = 0; j < 2; ++j) x(k, 0, j) = 10.0 * static_cast<double>(k) + static_cast<double>(j);
  const Tensor y = depth_to_space(x, 2);
  ASSERT_EQ(y.shape(), (Shape{1, 2, 4}));
  EXPECT_EQ(y.data(), (std::vector<double>{0, 10, 1, 11, 20, 30, 21, 31}));
}

TEST(DepthToSpace, IndivisibleChannelsRejected) {
  EXPECT_THROW(depth_to_space(Tensor({3, 1, 1}), 2), Error);
}

TEST(Bilinear, Examples) {
  const Tensor m({1, 2, 2}, std::vector<double>{1, 3, 5, 7});
  EXPECT_EQ(bilinear_sample(m, 1, 1)[0], 7.0);
  EXPECT_EQ(bilinear_sample(m, 0.5, 0)[0], 2.0);
  EXPECT_EQ(bilinear_sample(m, -5, -5)[0], 1.0);
  EXPECT_THROW(bilinear_sample(Tensor(), 0, 0), Error);
}

TEST(L2Normalize, Examples) {
  const Tensor y = l2_normalize_channels(Tensor({2, 1, 1}, std::vector<double>{3, 4}));
  EXPECT_NEAR(y.values()[0], 0.6, 1e-15);
  EXPECT_NEAR(y.values()[1], 0.8, 1e-15);
  const Tensor unit({2, 1, 1}, std::vector<double>{0, 1});
  EXPECT_EQ(l2_normalize_channels(unit), unit);
  const Tensor zero({2, 1, 1});
  EXPECT_EQ(l2_normalize_channels(zero), zero);
}

TEST(Upsample, CentreAligned) {
  const Tensor m({1, 1, 2}, std::vector<double>{0, 8});
  const Tensor y = upsample_bilinear(m, 8);
  ASSERT_EQ(y.shape(), (Shape{1, 8, 16}));
  EXPECT_EQ(y(0, 0, 0), 0.0);  // clamped left of the first centre
  EXPECT_EQ(y(0, 3, 15), 8.0);
  EXPECT_NEAR(y(0, 0, 8), 8.0 * (8.5 / 8 - 0.5), 1e-12);
}

}  // namespace
}  // namespace qsp::nn
