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

#include <limits>

#include "wrc/types.hpp"

namespace wrc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class GroundNorm { euclidean, max_abs };

// Adversary exponent p in [2, inf] together with its derived conjugates:
//   q       conjugate of p        (1/p + 1/q = 1, 1/inf = 0)
//   q_tilde conjugate of p/2      (2/p + 1/q_tilde = 1)
// and the ground norm used for transport costs. The dual norm pairs with the
// ground norm: Euclidean is self-dual, max_abs (l_inf) dualizes to l_1.
struct NormSpec {
  double p = kInf;
  GroundNorm ground = GroundNorm::euclidean;
  double q = 1.0;
  double q_tilde = 1.0;

  bool p_finite() const { return std::isfinite(p); }
};

// (q, q_tilde) for p in [2, inf]; throws ConfigError for p < 2.
std::pair<double, double> conjugate_exponents(double p);

NormSpec make_norm_spec(double p, GroundNorm ground);

double ground_norm(const Vec& v, const NormSpec& ns);
double dual_norm(const Vec& v, const NormSpec& ns);

// A subgradient of the dual norm at v, with the 0/0 = 0 convention at v = 0.
Vec dual_norm_subgradient(const Vec& v, const NormSpec& ns);

// Coordinatewise sign with sign(0) = 0.
Vec sign_vec(const Vec& v);

// Weighted power mean (sum_i w_i v_i^r)^{1/r} for v_i >= 0, stabilized by
// factoring out the maximum. r = inf gives the weighted essential sup
// (max over support points), r = 1 the plain weighted mean.
double power_mean(const std::vector<double>& values,
                  const std::vector<double>& weights, double r);

}  // namespace wrc
