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

#include "qsp/eval/detector_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "qsp/common/error.hpp"
#include "qsp/eval/homography.hpp"

namespace qsp::eval {
namespace {

using superpoint::Keypoint;

bool inside(const Eigen::Vector2d& p, ImageSize s) {
  return p.x() >= 0 && p.y() >= 0 && p.x() <= static_cast<double>(s.width) - 1 &&
         p.y() <= static_cast<double>(s.height) - 1;
}

std::vector<Eigen::Vector2d> positions(const std::vector<Keypoint>& pts) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, p.y);
  return out;
}

// Points of `src` whose warp lands inside `dst`, returned in the dst frame.
std::vector<Eigen::Vector2d> warp_kept(const std::vector<Eigen::Vector2d>& src,
                                       const Eigen::Matrix3d& h, ImageSize dst) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : src) {
    const Eigen::Vector2d q = apply_homography(h, p);
    if (q.allFinite() && inside(q, dst)) out.push_back(q);
  }
  return out;
}

struct Counts {
  std::size_t kept = 0;
  std::size_t correct = 0;
  double distance_sum = 0;
};

// For every warped point, the distance to the nearest target point.
void count_direction(const std::vector<Eigen::Vector2d>& warped,
                     const std::vector<Eigen::Vector2d>& targets, double eps, Counts& c) {
  c.kept += warped.size();
  for (const auto& p : warped) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : targets) best = std::min(best, (p - t).norm());
    if (best <= eps) {
      ++c.correct;
      c.distance_sum += best;
    }
  }
}

Counts evaluate(const std::vector<Keypoint>& a, const std::vector<Keypoint>& b,
                const Eigen::Matrix3d& h, ImageSize size_a, ImageSize size_b, double eps,
                std::size_t k) {
  require(std::abs(h.determinant()) > 1e-12, ErrorKind::kInvalidArgument,
          "homography is not invertible");
  require(eps >= 0, ErrorKind::kInvalidArgument, "eps must be non-negative");
  const Eigen::Matrix3d h_inv = h.inverse();
  // Top-k is taken among the points that survive the warp.
  auto keep_top = [&](const std::vector<Keypoint>& pts, const Eigen::Matrix3d& warp,
                      ImageSize dst) {
    std::vector<Keypoint> kept;
    for (const auto& p : pts) {
      const Eigen::Vector2d q = apply_homography(warp, Eigen::Vector2d(p.x, p.y));
      if (q.allFinite() && inside(q, dst)) kept.push_back(p);
    }
    return positions(top_k(std::move(kept), k));
  };
  const auto pa = keep_top(a, h, size_b);
  const auto pb = keep_top(b, h_inv, size_a);
  Counts c;
  count_direction(warp_kept(pa, h, size_b), pb, eps, c);
  count_direction(warp_kept(pb, h_inv, size_a), pa, eps, c);
  return c;
}

}  // namespace

std::vector<Keypoint> top_k(std::vector<Keypoint> points, std::size_t k) {
  std::stable_sort(points.begin(), points.end(),
                   [](const Keypoint& x, const Keypoint& y) { return x.score > y.score; });
  if (points.size() > k) points.resize(k);
  return points;
}

double repeatability(const std::vector<Keypoint>& a, const std::vector<Keypoint>& b,
                     const Eigen::Matrix3d& h, ImageSize size_a, ImageSize size_b, double eps,
                     std::size_t k) {
  const Counts c = evaluate(a, b, h, size_a, size_b, eps, k);
  require(c.kept > 0, ErrorKind::kUndefinedMetric, "repeatability: no points survive the warp");
  return static_cast<double>(c.correct) / static_cast<double>(c.kept);
}

double localization_error(const std::vector<Keypoint>& a, const std::vector<Keypoint>& b,
                          const Eigen::Matrix3d& h, ImageSize size_a, ImageSize size_b,
                          double eps, std::size_t k) {
  const Counts c = evaluate(a, b, h, size_a, size_b, eps, k);
  require(c.correct > 0, ErrorKind::kUndefinedMetric,
          "localization error: no correspondences within eps");
  return c.distance_sum / static_cast<double>(c.correct);
}

}  // namespace qsp::eval
