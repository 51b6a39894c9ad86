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

#include <cstdint>
#include <optional>

#include "wrc/measure.hpp"
#include "wrc/model.hpp"
#include "wrc/norms.hpp"

namespace wrc {

struct AttackConfig {
  double delta = 0.1;
  NormSpec ns;
  int steps = 200;
  double step_size = 0.0;  // 0 = auto (delta / 10)
  int restarts = 8;
  std::vector<int> frozen_coords;  // coordinates the adversary may not touch
  std::uint64_t seed = 0;
  double unbounded_cap = 1e8;  // inner-sup detection threshold for the dual
};

struct AttackResult {
  std::vector<Vec> perturbed;
  double value = 0.0;
  double transport_cost = 0.0;
  std::vector<double> per_restart;
  // Finite-p attacks search deterministic per-point maps only; general
  // couplings could be stronger, so the value is a certified lower bound.
  bool lower_bound_only = false;
};

// Pointwise projected gradient ascent inside the ground-norm ball of radius
// delta around each sample (the p = inf adversary). Ascent direction comes
// from -P_0 at the perturbed point; one restart is seeded at the first-order
// maximizer displacement, the rest start at random feasible points.
AttackResult pga_attack_pointwise(const Model& model, const ControlPath& ctrl,
                                  const EmpiricalMeasure& mu, const AttackConfig& cfg,
                                  const std::vector<Vec>* warm_start = nullptr);

// Coupled ascent over a displacement field with the radial-scaling projection
// onto {(sum_i w_i |u_i|^p)^{1/p} <= delta}, for finite p in [2, inf).
AttackResult pga_attack_wasserstein(const Model& model, const ControlPath& ctrl,
                                    const EmpiricalMeasure& mu, const AttackConfig& cfg,
                                    const std::vector<Vec>* warm_start = nullptr);

// gamma * delta^p + E[sup_xt { j(xt) - gamma |x - xt|^p }], the inner sup by
// multi-start gradient ascent. warm_starts, when given, adds per-point start
// candidates (e.g. a primal attack's points, which makes weak duality hold
// for the computed values as well). Finite p only.
double dual_value(const Model& model, const ControlPath& ctrl,
                  const EmpiricalMeasure& mu, const AttackConfig& cfg, double gamma,
                  const std::vector<Vec>* warm_starts = nullptr);

// Minimizes dual_value over gamma >= 0 (log-grid bracket around a Lipschitz
// estimate, then golden section). Returns (gamma*, value).
std::pair<double, double> solve_dual(const Model& model, const ControlPath& ctrl,
                                     const EmpiricalMeasure& mu,
                                     const AttackConfig& cfg,
                                     const std::vector<Vec>* warm_starts = nullptr);

// Brute-force lower bound on the robust risk at radius delta: dispatches to
// the pointwise (p = inf) or coupled (finite p) attack with strong defaults.
// For finite p the weak-duality sandwich pga <= dual is asserted on the run.
double robust_risk_oracle(const Model& model, const ControlPath& ctrl,
                          const EmpiricalMeasure& mu, double delta,
                          const NormSpec& ns,
                          const std::vector<Vec>* warm_start = nullptr,
                          std::vector<Vec>* out_displacement = nullptr);

}  // namespace wrc
