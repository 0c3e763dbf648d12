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

#include "qsp/eval/homography.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "qsp/common/error.hpp"
#include "qsp/vo/matching.hpp"

namespace qsp::eval {
namespace {

// Similarity moving the centroid to 0 and the mean distance to sqrt(2).
std::optional<Eigen::Matrix3d> normaliser(std::span<const Eigen::Vector2d> pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean = 0;
  for (const auto& p : pts) mean += (p - c).norm();
  mean /= static_cast<double>(pts.size());
  if (!(mean > 1e-12)) return std::nullopt;
  const double s = std::sqrt(2.0) / mean;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

}  // namespace

Eigen::Vector2d apply_homography(const Eigen::Matrix3d& h, const Eigen::Vector2d& p) {
  const Eigen::Vector3d q = h * p.homogeneous();
  return q.hnormalized();
}

std::optional<Eigen::Matrix3d> fit_homography(std::span<const Eigen::Vector2d> src,
                                              std::span<const Eigen::Vector2d> dst) {
  if (src.size() < 4 || src.size() != dst.size()) return std::nullopt;
  const auto ts = normaliser(src);
  const auto td = normaliser(dst);
  if (!ts || !td) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d p = (*ts * src[static_cast<std::size_t>(i)].homogeneous()).head<2>();
    const Eigen::Vector2d q = (*td * dst[static_cast<std::size_t>(i)].homogeneous()).head<2>();
    a.row(2 * i) << -p.x(), -p.y(), -1, 0, 0, 0, q.x() * p.x(), q.x() * p.y(), q.x();
    a.row(2 * i + 1) << 0, 0, 0, -p.x(), -p.y(), -1, q.y() * p.x(), q.y() * p.y(), q.y();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);
  Eigen::Matrix3d h = td->inverse() * hn * *ts;
  if (!h.allFinite() || std::abs(h(2, 2)) < 1e-15) return std::nullopt;
  h /= h(2, 2);
  if (std::abs(h.determinant()) < 1e-12) return std::nullopt;
  return h;
}

HomographyEstimate estimate_homography(std::span<const Eigen::Vector2d> src,
                                       std::span<const Eigen::Vector2d> dst,
                                       const RansacOptions& options) {
  require(src.size() == dst.size(), ErrorKind::kInvalidArgument, "point lists differ in length");
  require(src.size() >= 4, ErrorKind::kEstimationFailed,
          "homography needs at least 4 matches, got " + std::to_string(src.size()));
  const double t2 = options.threshold * options.threshold;
  auto inliers_of = [&](const Eigen::Matrix3d& h) {
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const Eigen::Vector2d p = apply_homography(h, src[i]);
      if (p.allFinite() && (p - dst[i]).squaredNorm() <= t2) in.push_back(i);
    }
    return in;
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
  HomographyEstimate best;
  bool found = false;
  for (int it = 0; it < options.iterations; ++it) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = pick(rng);
        fresh = true;
        for (std::size_t m = 0; m < k; ++m) fresh = fresh && idx[m] != idx[k];
      } while (!fresh);
    }
    std::array<Eigen::Vector2d, 4> s, d;
    for (std::size_t k = 0; k < 4; ++k) {
      s[k] = src[idx[k]];
      d[k] = dst[idx[k]];
    }
    const auto h = fit_homography(s, d);
    if (!h) continue;
    auto in = inliers_of(*h);
    if (in.size() > best.inliers.size()) {
      best.h = *h;
      best.inliers = std::move(in);
      found = true;
    }
  }
  require(found && best.inliers.size() >= 4, ErrorKind::kEstimationFailed,
          "RANSAC found no homography with 4 inliers");
  // Least-squares refit, repeated while the inlier set grows.
  for (int refit = 0; refit < 3; ++refit) {
    std::vector<Eigen::Vector2d> s, d;
    for (std::size_t i : best.inliers) {
      s.push_back(src[i]);
      d.push_back(dst[i]);
    }
    const auto h = fit_homography(s, d);
    if (!h) break;
    auto in = inliers_of(*h);
    if (in.size() < best.inliers.size()) break;
    const bool grew = in.size() > best.inliers.size();
    best.h = *h;
    best.inliers = std::move(in);
    if (!grew) break;
  }
  return best;
}

double corner_error(const Eigen::Matrix3d& estimate, const Eigen::Matrix3d& truth,
                    std::size_t width, std::size_t height) {
  const double w = static_cast<double>(width) - 1;
  const double h = static_cast<double>(height) - 1;
  const std::array<Eigen::Vector2d, 4> corners{
      Eigen::Vector2d(0, 0), Eigen::Vector2d(w, 0), Eigen::Vector2d(0, h), Eigen::Vector2d(w, h)};
  double sum = 0;
  for (const auto& c : corners) {
    sum += (apply_homography(estimate, c) - apply_homography(truth, c)).norm();
  }
  return sum / 4.0;
}

HomographyScore homography_score(const superpoint::DetectionResult& a,
                                 const superpoint::DetectionResult& b, const Eigen::Matrix3d& truth,
                                 std::size_t width, std::size_t height, double e,
                                 const RansacOptions& options) {
  HomographyScore score;
  score.corner_error = std::numeric_limits<double>::infinity();
  const auto matches = vo::match(a, b, -1.0);
  score.matches = matches.size();
  std::vector<Eigen::Vector2d> src, dst;
  for (const auto& m : matches) {
    src.emplace_back(a.keypoints[m.prev].x, a.keypoints[m.prev].y);
    dst.emplace_back(b.keypoints[m.curr].x, b.keypoints[m.curr].y);
  }
  try {
    const auto est = estimate_homography(src, dst, options);
    score.estimated = true;
    score.inliers = est.inliers.size();
    score.corner_error = corner_error(est.h, truth, width, height);
    score.correct = score.corner_error <= e;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kEstimationFailed) throw;
  }
  return score;
}

}  // namespace qsp::eval
