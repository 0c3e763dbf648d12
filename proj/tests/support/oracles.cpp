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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qsp::testing {

nn::Tensor conv_oracle(const nn::Tensor& x, const nn::ConvSpec& spec) {
  const std::size_t h = x.height(), w = x.width(), k = spec.kernel;
  const long pad = static_cast<long>(k / 2);
  nn::Tensor out({spec.out_channels, h, w});
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        long double acc = spec.bias[o];
        for (std::size_t i = 0; i < spec.in_channels; ++i) {
          for (std::size_t ky = 0; ky < k; ++ky) {
            for (std::size_t kx = 0; kx < k; ++kx) {
              const long sy = static_cast<long>(y + ky) - pad;
              const long sx = static_cast<long>(xx + kx) - pad;
              if (sy < 0 || sx < 0 || sy >= static_cast<long>(h) || sx >= static_cast<long>(w)) {
                continue;
              }
              acc += static_cast<long double>(
                         spec.weights[((o * spec.in_channels + i) * k + ky) * k + kx]) *
                     x(i, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
            }
          }
        }
        out(o, y, xx) = static_cast<double>(acc);
      }
    }
  }
  return out;
}

std::int64_t relu_quant_oracle(double x, double s, int bits) {
  const double levels = std::pow(2.0, bits) - 1;
  const double q = std::round(std::max(x, 0.0) / s);  // std::round: half away from zero
  return static_cast<std::int64_t>(std::min(q, levels));
}

std::int64_t count_le(const std::vector<double>& t, double x) {
  std::int64_t n = 0;
  for (double v : t) n += v <= x ? 1 : 0;
  return n;
}

std::vector<superpoint::Keypoint> nms_oracle(std::vector<superpoint::Keypoint> pts, int radius) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  std::vector<superpoint::Keypoint> kept;
  for (const auto& p : pts) {
    bool ok = true;
    for (const auto& q : kept) {
      if (std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)) <= radius) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(p);
  }
  return kept;
}

ScalarPose compose(const ScalarPose& a, const ScalarPose& b) {
  ScalarPose c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c.r[i][j] = 0;
      for (int k = 0; k < 3; ++k) c.r[i][j] += a.r[i][k] * b.r[k][j];
    }
    c.t[i] = a.t[i];
    for (int k = 0; k < 3; ++k) c.t[i] += a.r[i][k] * b.t[k];
  }
  return c;
}

ScalarPose invert(const ScalarPose& p) {
  ScalarPose q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q.r[i][j] = p.r[j][i];
  for (int i = 0; i < 3; ++i) {
    q.t[i] = 0;
    for (int k = 0; k < 3; ++k) q.t[i] -= q.r[i][k] * p.t[k];
  }
  return q;
}

ScalarPose rot_z(double deg, std::array<double, 3> t) { return rot_axis({0, 0, 1}, deg, t); }

// Rodrigues with a unit axis.
ScalarPose rot_axis(std::array<double, 3> axis, double deg, std::array<double, 3> t) {
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  const double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
  const double th = deg * std::numbers::pi / 180.0;
  const double c = std::cos(th), s = std::sin(th), v = 1 - c;
  ScalarPose p;
  p.r = {{{c + x * x * v, x * y * v - z * s, x * z * v + y * s},
          {y * x * v + z * s, c + y * y * v, y * z * v - x * s},
          {z * x * v - y * s, z * y * v + x * s, c + z * z * v}}};
  p.t = t;
  return p;
}

double angle_deg(const ScalarPose& p) {
  const double tr = p.r[0][0] + p.r[1][1] + p.r[2][2];
  return std::acos(std::clamp((tr - 1) / 2, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

double translation_norm(const ScalarPose& p) {
  return std::sqrt(p.t[0] * p.t[0] + p.t[1] * p.t[1] + p.t[2] * p.t[2]);
}

ScalarErrors ape_oracle(const std::vector<ScalarPose>& est, const std::vector<ScalarPose>& gt) {
  double r = 0, t = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const ScalarPose e = compose(invert(gt[i]), est[i]);
    r += angle_deg(e) * angle_deg(e);
    t += translation_norm(e) * translation_norm(e);
  }
  const double n = static_cast<double>(est.size());
  return {std::sqrt(r / n), std::sqrt(t / n)};
}

ScalarErrors rpe_oracle(const std::vector<double>& times, const std::vector<ScalarPose>& est,
                        const std::vector<ScalarPose>& gt, double delta) {
  double r = 0, t = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::size_t j = i + 1;
    while (j < times.size() && times[j] - times[i] < delta) ++j;
    if (j >= times.size()) break;
    const ScalarPose dq = compose(invert(gt[i]), gt[j]);
    const ScalarPose dp = compose(invert(est[i]), est[j]);
    const ScalarPose e = compose(invert(dq), dp);
    const double a = angle_deg(e);
    const double tr = translation_norm(e) / (times[j] - times[i]);
    r += a * a;
    t += tr * tr;
    ++n;
  }
  return {std::sqrt(r / static_cast<double>(n)), std::sqrt(t / static_cast<double>(n))};
}

}  // namespace qsp::testing
