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

#include "qsp/quant/thresholds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace qsp::quant {
namespace {

constexpr std::uint64_t kSignBit = std::uint64_t{1} << 63;

// Order-preserving map from doubles (no NaN) to integers; +0 and -0 share 0.
std::int64_t ordinal(double x) {
  const auto u = std::bit_cast<std::uint64_t>(x);
  return (u & kSignBit) ? -static_cast<std::int64_t>(u & ~kSignBit) : static_cast<std::int64_t>(u);
}

double from_ordinal(std::int64_t o) {
  return o < 0 ? std::bit_cast<double>(static_cast<std::uint64_t>(-o) | kSignBit)
               : std::bit_cast<double>(static_cast<std::uint64_t>(o));
}

// Smallest double x with a * x + b >= t, both operations rounded as the
// executor rounds them. x -> a * x + b is monotone for a > 0, so bisection
// over the ordered doubles finds the exact boundary.
double pull_back(double t, double a, double b) {
  const auto reaches = [&](double x) { return a * x + b >= t; };
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (reaches(-inf)) return -inf;
  // Ordinals span about 2^64, so the search arithmetic runs in 128 bits.
  using Wide = __int128;
  Wide lo = ordinal(-inf), hi = ordinal(inf);
  const double guess = (t - b) / a;
  if (!std::isnan(guess)) {
    // Most boundaries sit within a few ulps of the real-arithmetic answer.
    const Wide g = ordinal(guess);
    for (Wide step = 1; step < (Wide{1} << 64); step *= 16) {
      const Wide below = std::max(g - step, lo), above = std::min(g + step, hi);
      if (!reaches(from_ordinal(static_cast<std::int64_t>(below))) &&
          reaches(from_ordinal(static_cast<std::int64_t>(above)))) {
        lo = below;
        hi = above;
        break;
      }
    }
  }
  while (hi - lo > 1) {
    const Wide mid = lo + (hi - lo) / 2;
    if (reaches(from_ordinal(static_cast<std::int64_t>(mid)))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double x = from_ordinal(static_cast<std::int64_t>(hi));
  return x == 0.0 ? 0.0 : x;
}

}  // namespace

std::span<const double> ThresholdSet::row(std::size_t channel) const {
  const std::size_t r = rows == 1 ? 0 : channel;
  return std::span<const double>(values).subspan(r * count, count);
}

std::span<double> ThresholdSet::row(std::size_t channel) {
  const std::size_t r = rows == 1 ? 0 : channel;
  return std::span<double>(values).subspan(r * count, count);
}

void ThresholdSet::validate() const {
  require(rows > 0, ErrorKind::kInvalidArgument, "threshold set has no rows");
  require(values.size() == rows * count, ErrorKind::kInvalidArgument,
          "threshold matrix size does not match rows x count");
  for (std::size_t r = 0; r < rows; ++r) {
    const auto thresholds = row(r);
    for (std::size_t j = 0; j < count; ++j) {
      require(!std::isnan(thresholds[j]), ErrorKind::kInvalidArgument, "NaN threshold");
      require(j == 0 || thresholds[j - 1] <= thresholds[j], ErrorKind::kInvalidArgument,
              "threshold row " + std::to_string(r) + " is not sorted at index " +
                  std::to_string(j));
    }
  }
}

ThresholdSet quant_to_thresholds(const QuantParams& act_params) {
  act_params.validate();
  require(!act_params.is_signed, ErrorKind::kInvalidArgument,
          "threshold lowering needs unsigned (post-ReLU) activation parameters");
  const std::size_t levels = static_cast<std::size_t>(act_params.qmax());
  ThresholdSet set;
  set.rows = act_params.scale_count();
  set.count = levels;
  set.out_bit_width = act_params.bit_width;
  set.out_scale = act_params.per_channel() ? 1.0 : act_params.scale_for(0);
  set.values.resize(set.rows * levels);
  const auto qmax = act_params.qmax();
  for (std::size_t r = 0; r < set.rows; ++r) {
    const double s = act_params.scale_for(r);
    for (std::size_t j = 1; j <= levels; ++j) {
      const auto level = static_cast<std::int64_t>(j);
      double t = s * (static_cast<double>(j) - 0.5);
      // Snap to the smallest double that quantises to `level`; s * (j - 0.5)
      // can sit an ulp either side of it.
      for (int step = 0; step < 64 && quantize_value(t, s, 0, qmax) < level; ++step) {
        t = std::nextafter(t, std::numeric_limits<double>::infinity());
      }
      for (int step = 0; step < 64; ++step) {
        const double below = std::nextafter(t, -std::numeric_limits<double>::infinity());
        if (quantize_value(below, s, 0, qmax) < level) break;
        t = below;
      }
      set.values[r * levels + j - 1] = t;
    }
  }
  return set;
}

std::int64_t threshold_level(std::span<const double> row, double x) {
  return std::upper_bound(row.begin(), row.end(), x) - row.begin();
}

QuantTensor apply_thresholds(const nn::Tensor& x, const ThresholdSet& thresholds) {
  thresholds.validate();
  require(thresholds.rows == 1 || thresholds.rows == x.channels(), ErrorKind::kInvalidArgument,
          "threshold rows " + std::to_string(thresholds.rows) + " do not match " +
              std::to_string(x.channels()) + " channels");
  nn::IntTensor levels(x.shape());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const auto row = thresholds.row(c);
    const auto in = x.channel(c);
    auto out = levels.channel(c);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = threshold_level(row, in[i]);
  }
  return {std::move(levels),
          QuantParams::unsigned_tensor(thresholds.out_bit_width, thresholds.out_scale)};
}

ThresholdSet absorb_affine(const ThresholdSet& thresholds, std::span<const double> a,
                           std::span<const double> b) {
  thresholds.validate();
  require(!a.empty() && !b.empty(), ErrorKind::kInvalidArgument, "affine parameters are empty");
  for (double scale : a) {
    require(scale > 0, ErrorKind::kUnsupportedTransform,
            "affine scale " + std::to_string(scale) +
                " is not positive; absorbing it would reverse threshold order");
  }
  const std::size_t rows = std::max({thresholds.rows, a.size(), b.size()});
  auto check = [rows](std::size_t n, const char* what) {
    require(n == 1 || n == rows, ErrorKind::kInvalidArgument,
            std::string("cannot broadcast ") + what + " to " + std::to_string(rows) + " channels");
  };
  check(thresholds.rows, "thresholds");
  check(a.size(), "affine scale");
  check(b.size(), "affine offset");
  ThresholdSet out = thresholds;
  out.rows = rows;
  out.values.resize(rows * thresholds.count);
  for (std::size_t r = 0; r < rows; ++r) {
    const double ar = a[a.size() == 1 ? 0 : r];
    const double br = b[b.size() == 1 ? 0 : r];
    const auto src = thresholds.row(r);
    for (std::size_t j = 0; j < thresholds.count; ++j) {
      out.values[r * thresholds.count + j] = pull_back(src[j], ar, br);
    }
  }
  return out;
}

}  // namespace qsp::quant
