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

#include "qsp/vo/matching.hpp"

#include <Eigen/Core>

namespace qsp::vo {

MatchSet match(const superpoint::DetectionResult& a, const superpoint::DetectionResult& b,
               double min_similarity) {
  MatchSet out;
  if (a.size() == 0 || b.size() == 0) return out;
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto dim = static_cast<Eigen::Index>(superpoint::kDescriptorDim);
  const Eigen::Map<const RowMatrix> da(a.descriptors.data(), static_cast<Eigen::Index>(a.size()), dim);
  const Eigen::Map<const RowMatrix> db(b.descriptors.data(), static_cast<Eigen::Index>(b.size()), dim);
  const Eigen::MatrixXd sim = da * db.transpose();

  std::vector<Eigen::Index> best_b(a.size()), best_a(b.size());
  for (Eigen::Index i = 0; i < sim.rows(); ++i) sim.row(i).maxCoeff(&best_b[static_cast<std::size_t>(i)]);
  for (Eigen::Index j = 0; j < sim.cols(); ++j) sim.col(j).maxCoeff(&best_a[static_cast<std::size_t>(j)]);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto j = static_cast<std::size_t>(best_b[i]);
    if (static_cast<std::size_t>(best_a[j]) != i) continue;
    const double s = sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (s < min_similarity) continue;
    out.push_back({i, j, s});
  }
  return out;
}

}  // namespace qsp::vo
