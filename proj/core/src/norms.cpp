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

#include "wrc/norms.hpp"

#include <algorithm>
#include <cmath>

namespace wrc {

std::pair<double, double> conjugate_exponents(double p) {
  if (std::isnan(p) || p < 2.0) {
    throw ConfigError("adversary exponent p must lie in [2, inf]");
  }
  double q, q_tilde;
  if (std::isinf(p)) {
    q = 1.0;
    q_tilde = 1.0;
  } else if (p == 2.0) {
    q = 2.0;
    q_tilde = kInf;
  } else {
    q = p / (p - 1.0);
    q_tilde = p / (p - 2.0);
  }
  return {q, q_tilde};
}

NormSpec make_norm_spec(double p, GroundNorm ground) {
  const auto [q, qt] = conjugate_exponents(p);
  NormSpec ns;
  ns.p = p;
  ns.ground = ground;
  ns.q = q;
  ns.q_tilde = qt;
  return ns;
}

double ground_norm(const Vec& v, const NormSpec& ns) {
  switch (ns.ground) {
    case GroundNorm::euclidean:
      return v.norm();
    case GroundNorm::max_abs:
      return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

double dual_norm(const Vec& v, const NormSpec& ns) {
  switch (ns.ground) {
    case GroundNorm::euclidean:
      return v.norm();
    case GroundNorm::max_abs:
      return v.cwiseAbs().sum();
  }
  return 0.0;
}

Vec sign_vec(const Vec& v) {
  Vec s(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    s[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
  }
  return s;
}

Vec dual_norm_subgradient(const Vec& v, const NormSpec& ns) {
  switch (ns.ground) {
    case GroundNorm::euclidean: {
      const double n = v.norm();
      if (n == 0.0) return Vec::Zero(v.size());
      return v / n;
    }
    case GroundNorm::max_abs:
      // dual norm is l_1; subgradient is the coordinatewise sign.
      return sign_vec(v);
  }
  return Vec::Zero(v.size());
}

double power_mean(const std::vector<double>& values,
                  const std::vector<double>& weights, double r) {
  if (values.empty()) return 0.0;
  const double vmax = *std::max_element(values.begin(), values.end());
  if (std::isinf(r)) {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (weights[i] > 0.0) m = std::max(m, values[i]);
    }
    return m;
  }
  if (vmax <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += weights[i] * std::pow(values[i] / vmax, r);
  }
  return vmax * std::pow(acc, 1.0 / r);
}

}  // namespace wrc
