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

#include "wrc/model.hpp"
#include "wrc/norms.hpp"
#include "wrc/types.hpp"

namespace wrc {

// Discrete state/adjoint system, per sample. With M_k = I + h Dxi f(X_k, th_k),
// G_k(u) = sum_i u_i Hess f_i(X_k, th_k), all sweeps below are the exact
// adjoints of the Euler recursion X_{k+1} = X_k + h f(X_k, th_k):
//
//   P_N = -grad_xi ell(X_N, th_N)
//   P_k = M_k^T P_{k+1} - h grad_xi Phi(X_k, th_k)          => P_0 = -grad_x j
//   beta_{k+1} = M_k beta_k
//   ahat_N = Hess ell^T beta_N
//   ahat_k = M_k^T ahat_{k+1} - h G_k(P_{k+1}) beta_k + h Hess Phi beta_k
//   alpha  = P + ahat
//
// The tangent/cotangent pairs (zeta, eta) and (gamma, rho) follow the same
// pattern; see the individual functions.

struct Trajectory {
  std::vector<Vec> states;  // X_0 .. X_N

  int num_steps() const { return static_cast<int>(states.size()) - 1; }
};

struct AdjointBundle1 {
  std::vector<Vec> P;
  std::vector<Vec> beta;
  std::vector<Vec> alpha;
  std::vector<Vec> alpha_hat;
};

// Second-order adjoints (p = infinity pathway).
struct AdjointBundle2 {
  std::vector<Vec> lambda;  // forward, lambda_0 = (delta/2) P_0 / |P_0|
  std::vector<Vec> psi;     // backward, psi_N = -Hess ell^T beta_N
  std::vector<Vec> pi;      // forward
  std::vector<Vec> phi;     // backward
};

// Batch statistics entering Def-beta style boundary conditions.
// mean_dual_q = weighted mean of |P_0|_*^q over the batch,
// kappa = (1/delta) * mean_dual_q^{1/p} for delta > 0.
struct BatchStats {
  double mean_dual_q = 0.0;
  double kappa = 0.0;
};

BatchStats make_batch_stats(const std::vector<Vec>& P0s,
                            const std::vector<double>& weights, double delta,
                            const NormSpec& ns);

Trajectory forward_state(const Model& model, const ControlPath& ctrl, const Vec& x);

std::vector<Vec> backward_costate(const Model& model, const ControlPath& ctrl,
                                  const Trajectory& traj);

// beta_0 = delta * mean_dual_q^{-1/p} * |P_0|^{q-2} P_0 for the Euclidean
// ground norm (0/0 = 0 at P_0 = 0); beta_0 = delta * sign(P_0) for the
// (p = inf, max_abs) pairing. Any other (norm, p) combination is refused.
std::vector<Vec> forward_beta(const Model& model, const ControlPath& ctrl,
                              const Trajectory& traj, const Vec& P0,
                              const BatchStats& stats, double delta,
                              const NormSpec& ns);

// Returns (alpha, alpha_hat); alpha_k = P_k + alpha_hat_k holds exactly.
std::pair<std::vector<Vec>, std::vector<Vec>> backward_alpha(
    const Model& model, const ControlPath& ctrl, const Trajectory& traj,
    const std::vector<Vec>& P, const std::vector<Vec>& beta);

AdjointBundle2 second_order_sweeps(const Model& model, const ControlPath& ctrl,
                                   const Trajectory& traj,
                                   const AdjointBundle1& bundle1, double delta,
                                   const NormSpec& ns);

// zeta_0 = dx, zeta_{k+1} = M_k zeta_k: the directional derivative of the
// state flow with respect to the initial point.
std::vector<Vec> directional_state(const Model& model, const ControlPath& ctrl,
                                   const Trajectory& traj, const Vec& dx);

// eta_k = directional derivative of P_k in the initial point, along the zeta
// sweep. Needs the costate because the linearization of M_k^T P_{k+1} in X_k
// contracts the dynamics Hessian with P_{k+1}.
std::vector<Vec> directional_costate(const Model& model, const ControlPath& ctrl,
                                     const Trajectory& traj,
                                     const std::vector<Vec>& P,
                                     const std::vector<Vec>& zeta);

// gamma_0 = z, gamma forward like zeta; rho backward with
// rho_N = Hess ell gamma_N, rho_k = M_k^T rho_{k+1} - h G_k(P_{k+1}) gamma_k.
// Satisfies grad_x (P_0 . z) = -rho_0 exactly, i.e. rho_0 . z = z^T D2_x j z.
std::pair<std::vector<Vec>, std::vector<Vec>> direction_pair(
    const Model& model, const ControlPath& ctrl, const Trajectory& traj,
    const std::vector<Vec>& P, const Vec& z);

}  // namespace wrc
