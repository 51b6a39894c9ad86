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

#include "wrc/measure.hpp"

namespace wrc {

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Vec> pts) {
  if (pts.empty()) throw ConfigError("empirical measure needs at least one point");
  EmpiricalMeasure mu;
  mu.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  mu.points = std::move(pts);
  return mu;
}

EmpiricalMeasure EmpiricalMeasure::weighted(std::vector<Vec> pts,
                                            std::vector<double> w) {
  if (pts.empty()) throw ConfigError("empirical measure needs at least one point");
  if (pts.size() != w.size()) throw ConfigError("weights do not match points");
  double total = 0.0;
  for (double wi : w) {
    if (wi < 0.0) throw ConfigError("weights must be nonnegative");
    total += wi;
  }
  if (total <= 0.0) throw ConfigError("weights must not all vanish");
  for (double& wi : w) wi /= total;
  EmpiricalMeasure mu;
  mu.points = std::move(pts);
  mu.weights = std::move(w);
  return mu;
}

EmpiricalMeasure EmpiricalMeasure::subset(const std::vector<std::size_t>& idx) const {
  std::vector<Vec> pts;
  pts.reserve(idx.size());
  for (std::size_t i : idx) pts.push_back(points.at(i));
  return uniform(std::move(pts));
}

}  // namespace wrc
