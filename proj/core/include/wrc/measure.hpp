// Copyright 2026 The wrc Authors.
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

#pragma once

#include "wrc/types.hpp"

namespace wrc {

// Finite weighted point set representing the data distribution mu_0.
// Weights are normalized to sum to one on construction.
struct EmpiricalMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }

  static EmpiricalMeasure uniform(std::vector<Vec> pts);
  static EmpiricalMeasure weighted(std::vector<Vec> pts, std::vector<double> w);

  // Measure restricted to an index subset, weights renormalized uniformly
  // (used for contiguous training batches).
  EmpiricalMeasure subset(const std::vector<std::size_t>& idx) const;
};

}  // namespace wrc
