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

#include "qsp/nn/tensor.hpp"

#include <cmath>

namespace qsp::nn {

std::string to_string(const Shape& shape) {
  return "(" + std::to_string(shape.channels) + ", " + std::to_string(shape.height) + ", " +
         std::to_string(shape.width) + ")";
}

void require_finite(const Tensor& tensor, const std::string& what) {
  for (double v : tensor.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, what + " contains a non-finite value");
  }
}

Tensor to_real(const IntTensor& tensor) {
  std::vector<double> data(tensor.values().begin(), tensor.values().end());
  return Tensor(tensor.shape(), std::move(data));
}

}  // namespace qsp::nn
