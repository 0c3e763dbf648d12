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

#include "qsp/eval/trajectory_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qsp/common/error.hpp"
#include "qsp/io/tum.hpp"
#include "qsp/vo/geometry.hpp"

namespace qsp::eval {
namespace {

std::vector<double> stamps(const vo::Trajectory& t) {
  std::vector<double> out;
  out.reserve(t.size());
  for (const auto& e : t.entries()) out.push_back(e.timestamp);
  return out;
}

// Error of `est` against `ref`, E = ref^-1 est. The angle of E is taken
// from ||R_ref - R_est||_F = 2 sqrt(2) sin(theta / 2), which is exactly zero
// for identical rotations where arccos of the trace is not.
void accumulate(const vo::PoseSE3& ref, const vo::PoseSE3& est, double trans_divisor,
                double& rot_sq, double& trans_sq) {
  const double chord = (ref.rotation - est.rotation).norm() / (2.0 * std::sqrt(2.0));
  const double rot = vo::rad_to_deg(2.0 * std::asin(std::min(chord, 1.0)));
  const Eigen::Vector3d t = ref.rotation.transpose() * (est.translation - ref.translation);
  const double trans = t.norm() / trans_divisor;
  rot_sq += rot * rot;
  trans_sq += trans * trans;
}

}  // namespace

PosePairs associate(const vo::Trajectory& est, const vo::Trajectory& gt, double max_dt) {
  require(!est.empty() && !gt.empty(), ErrorKind::kUndefinedMetric, "empty trajectory");
  auto pairs = io::associate_timestamps(stamps(est), stamps(gt), max_dt);
  require(!pairs.empty(), ErrorKind::kUndefinedMetric,
          "no poses associate within " + std::to_string(max_dt) + " s");
  return pairs;
}

PoseError ape(const vo::Trajectory& est, const vo::Trajectory& gt, double max_dt) {
  const auto pairs = associate(est, gt, max_dt);
  require(pairs.size() >= 2, ErrorKind::kUndefinedMetric, "APE needs at least 2 associated poses");
  double rot_sq = 0, trans_sq = 0;
  for (const auto& [i, j] : pairs) {
    accumulate(gt[j].pose, est[i].pose, 1.0, rot_sq, trans_sq);
  }
  const auto n = static_cast<double>(pairs.size());
  return {std::sqrt(rot_sq / n), std::sqrt(trans_sq / n), pairs.size()};
}

PoseError rpe(const vo::Trajectory& est, const vo::Trajectory& gt, double delta, double max_dt) {
  require(delta > 0, ErrorKind::kInvalidArgument, "RPE delta must be positive");
  const auto pairs = associate(est, gt, max_dt);
  double rot_sq = 0, trans_sq = 0;
  std::size_t n = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double ti = est[pairs[i].first].timestamp;
    if (j <= i) j = i + 1;
    while (j < pairs.size() && est[pairs[j].first].timestamp - ti < delta) ++j;
    if (j >= pairs.size()) break;
    const double dt = est[pairs[j].first].timestamp - ti;
    const vo::PoseSE3& pi = est[pairs[i].first].pose;
    const vo::PoseSE3& pj = est[pairs[j].first].pose;
    const vo::PoseSE3& qi = gt[pairs[i].second].pose;
    const vo::PoseSE3& qj = gt[pairs[j].second].pose;
    accumulate(qi.inverse() * qj, pi.inverse() * pj, dt, rot_sq, trans_sq);
    ++n;
  }
  require(n > 0, ErrorKind::kUndefinedMetric,
          "no associated pose pair spans " + std::to_string(delta) + " s");
  const auto count = static_cast<double>(n);
  return {std::sqrt(rot_sq / count), std::sqrt(trans_sq / count), n};
}

std::vector<AngleSample> angle_traces(const vo::Trajectory& est, const vo::Trajectory& gt,
                                      double max_dt) {
  std::vector<AngleSample> out;
  for (const auto& [i, j] : associate(est, gt, max_dt)) {
    const Eigen::Vector3d e = vo::euler_zyx(est[i].pose.rotation);
    const Eigen::Vector3d g = vo::euler_zyx(gt[j].pose.rotation);
    out.push_back({est[i].timestamp, vo::rad_to_deg(e.x()), vo::rad_to_deg(e.y()),
                   vo::rad_to_deg(e.z()), vo::rad_to_deg(g.x()), vo::rad_to_deg(g.y()),
                   vo::rad_to_deg(g.z())});
  }
  return out;
}

}  // namespace qsp::eval
