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

#include "wrc/propagation.hpp"

#include <cmath>

namespace wrc {

namespace {

Mat step_matrix(const Model& model, const ControlPath& ctrl, const Trajectory& traj,
                int k) {
  const int d = model.dim();
  return Mat::Identity(d, d) +
         ctrl.h * model.dynamics->jacobian_xi(traj.states[static_cast<std::size_t>(k)],
                                              ctrl.layers[static_cast<std::size_t>(k)]);
}

}  // namespace

BatchStats make_batch_stats(const std::vector<Vec>& P0s,
                            const std::vector<double>& weights, double delta,
                            const NormSpec& ns) {
  require_shape(P0s.size() == weights.size(), "batch stats size mismatch");
  BatchStats st;
  double acc = 0.0;
  for (std::size_t i = 0; i < P0s.size(); ++i) {
    acc += weights[i] * std::pow(dual_norm(P0s[i], ns), ns.q);
  }
  st.mean_dual_q = acc;
  st.kappa = delta > 0.0
                 ? (ns.p_finite() ? std::pow(st.mean_dual_q, 1.0 / ns.p) / delta
                                  : 1.0 / delta)
                 : 0.0;
  return st;
}

Trajectory forward_state(const Model& model, const ControlPath& ctrl, const Vec& x) {
  validate_control(model, ctrl);
  model.dynamics->check_state(x);
  const int N = ctrl.num_layers();
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(N) + 1);
  traj.states.push_back(x);
  for (int k = 0; k < N; ++k) {
    const Vec& xk = traj.states.back();
    Vec next = xk + ctrl.h * model.dynamics->eval(xk, ctrl.layers[static_cast<std::size_t>(k)]);
    if (!all_finite(next)) {
      throw NumericError("forward state propagation produced non-finite values");
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

std::vector<Vec> backward_costate(const Model& model, const ControlPath& ctrl,
                                  const Trajectory& traj) {
  const int N = ctrl.num_layers();
  require_shape(traj.num_steps() == N, "trajectory does not match control path");
  std::vector<Vec> P(static_cast<std::size_t>(N) + 1);
  P[static_cast<std::size_t>(N)] =
      -model.terminal->grad_xi(traj.states[static_cast<std::size_t>(N)], ctrl.terminal);
  const bool has_running = !model.running->is_zero();
  for (int k = N - 1; k >= 0; --k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    Vec pk = step_matrix(model, ctrl, traj, k).transpose() * P[uk + 1];
    if (has_running) {
      pk -= ctrl.h * model.running->grad_xi(traj.states[uk], ctrl.layers[uk]);
    }
    P[uk] = std::move(pk);
  }
  return P;
}

std::vector<Vec> forward_beta(const Model& model, const ControlPath& ctrl,
                              const Trajectory& traj, const Vec& P0,
                              const BatchStats& stats, double delta,
                              const NormSpec& ns) {
  const int N = ctrl.num_layers();
  require_shape(traj.num_steps() == N, "trajectory does not match control path");
  Vec beta0;
  if (ns.ground == GroundNorm::euclidean) {
    const double nrm = P0.norm();
    if (delta == 0.0 || nrm == 0.0 || stats.mean_dual_q == 0.0) {
      beta0 = Vec::Zero(P0.size());  // 0/0 = 0 convention
    } else {
      const double scale =
          ns.p_finite() ? delta * std::pow(stats.mean_dual_q, -1.0 / ns.p) : delta;
      beta0 = scale * std::pow(nrm, ns.q - 2.0) * P0;
    }
  } else if (!ns.p_finite()) {
    beta0 = delta * sign_vec(P0);
  } else {
    throw CapabilityError(
        "beta sweep requires the Euclidean ground norm (or p = inf with max_abs)");
  }

  std::vector<Vec> beta(static_cast<std::size_t>(N) + 1);
  beta[0] = std::move(beta0);
  for (int k = 0; k < N; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    beta[uk + 1] = step_matrix(model, ctrl, traj, k) * beta[uk];
  }
  return beta;
}

std::pair<std::vector<Vec>, std::vector<Vec>> backward_alpha(
    const Model& model, const ControlPath& ctrl, const Trajectory& traj,
    const std::vector<Vec>& P, const std::vector<Vec>& beta) {
  const int N = ctrl.num_layers();
  require_shape(static_cast<int>(P.size()) == N + 1 &&
                    static_cast<int>(beta.size()) == N + 1,
                "adjoint sweeps do not match control path");
  const bool has_running = !model.running->is_zero();
  std::vector<Vec> ahat(static_cast<std::size_t>(N) + 1);
  ahat[static_cast<std::size_t>(N)] =
      model.terminal->hess_xi(traj.states[static_cast<std::size_t>(N)], ctrl.terminal)
          .transpose() *
      beta[static_cast<std::size_t>(N)];
  for (int k = N - 1; k >= 0; --k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    Vec a = step_matrix(model, ctrl, traj, k).transpose() * ahat[uk + 1];
    a -= ctrl.h * model.dynamics->hess_contract_out(traj.states[uk], ctrl.layers[uk],
                                                    P[uk + 1]) *
         beta[uk];
    if (has_running) {
      a += ctrl.h * model.running->hess_xi(traj.states[uk], ctrl.layers[uk]) * beta[uk];
    }
    ahat[uk] = std::move(a);
  }
  std::vector<Vec> alpha(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    alpha[uk] = P[uk] + ahat[uk];
  }
  return {std::move(alpha), std::move(ahat)};
}

AdjointBundle2 second_order_sweeps(const Model& model, const ControlPath& ctrl,
                                   const Trajectory& traj,
                                   const AdjointBundle1& bundle1, double delta,
                                   const NormSpec& ns) {
  if (ns.p_finite()) {
    throw CapabilityError("second-order sweeps are defined for p = inf only");
  }
  if (ns.ground != GroundNorm::euclidean) {
    throw CapabilityError("second-order sweeps require the Euclidean ground norm");
  }
  const int N = ctrl.num_layers();
  const Vec& P0 = bundle1.P[0];
  const double nrm = P0.norm();
  if (nrm == 0.0) {
    throw NumericError("degenerate gradient: P_0 = 0 leaves the second-order "
                       "boundary conditions undefined");
  }
  const Vec Phat = P0 / nrm;
  const bool has_running = !model.running->is_zero();

  AdjointBundle2 b2;
  b2.lambda.resize(static_cast<std::size_t>(N) + 1);
  b2.psi.resize(static_cast<std::size_t>(N) + 1);
  b2.pi.resize(static_cast<std::size_t>(N) + 1);
  b2.phi.resize(static_cast<std::size_t>(N) + 1);

  // lambda: forward, same propagator as beta (lambda = beta / 2 at p = inf).
  b2.lambda[0] = 0.5 * delta * Phat;
  for (int k = 0; k < N; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    b2.lambda[uk + 1] = step_matrix(model, ctrl, traj, k) * b2.lambda[uk];
  }

  // psi: backward, adjoint of the beta sweep.
  b2.psi[static_cast<std::size_t>(N)] =
      -model.terminal->hess_xi(traj.states[static_cast<std::size_t>(N)], ctrl.terminal)
           .transpose() *
      bundle1.beta[static_cast<std::size_t>(N)];
  for (int k = N - 1; k >= 0; --k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    Vec v = step_matrix(model, ctrl, traj, k).transpose() * b2.psi[uk + 1];
    v += ctrl.h * model.dynamics->hess_contract_out(traj.states[uk], ctrl.layers[uk],
                                                    bundle1.P[uk + 1]) *
         bundle1.beta[uk];
    if (has_running) {
      v -= ctrl.h * model.running->hess_xi(traj.states[uk], ctrl.layers[uk]) *
           bundle1.beta[uk];
    }
    b2.psi[uk] = std::move(v);
  }

  // pi: forward, adjoint of the costate sweep. The boundary value differentiates
  // the objective terms delta*|P_0| + (delta/2) ahat_0 . P_0 / |P_0| and the
  // beta_0 boundary map in P_0.
  {
    const Mat proj = Mat::Identity(P0.size(), P0.size()) - Phat * Phat.transpose();
    b2.pi[0] = delta * (Phat + (0.5 / nrm) * (proj * (bundle1.alpha_hat[0] - b2.psi[0])));
  }
  for (int k = 0; k < N; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    Vec v = step_matrix(model, ctrl, traj, k) * b2.pi[uk];
    v -= ctrl.h * model.dynamics->hess_contract_in(traj.states[uk], ctrl.layers[uk],
                                                   bundle1.beta[uk], b2.lambda[uk]);
    b2.pi[uk + 1] = std::move(v);
  }

  // phi: backward, adjoint of the state sweep for the full second-order
  // objective. Collapses to the costate P when delta = 0.
  {
    const std::size_t uN = static_cast<std::size_t>(N);
    const Vec& XN = traj.states[uN];
    b2.phi[uN] = -model.terminal->grad_xi(XN, ctrl.terminal) +
                 model.terminal->hess_xi(XN, ctrl.terminal) * b2.pi[uN] -
                 model.terminal->third_contract(XN, ctrl.terminal,
                                                b2.lambda[uN], bundle1.beta[uN]);
  }
  for (int k = N - 1; k >= 0; --k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    const Vec& xk = traj.states[uk];
    const Vec& th = ctrl.layers[uk];
    Vec v = step_matrix(model, ctrl, traj, k).transpose() * b2.phi[uk + 1];
    v -= ctrl.h * model.dynamics->hess_contract_out(xk, th, bundle1.P[uk + 1]) * b2.pi[uk];
    v += 0.5 * ctrl.h *
         model.dynamics->hess_contract_out(xk, th, b2.psi[uk + 1]) * bundle1.beta[uk];
    v -= ctrl.h *
         model.dynamics->hess_contract_out(xk, th, bundle1.alpha_hat[uk + 1]) *
         b2.lambda[uk];
    v += ctrl.h * model.dynamics->third_contract(xk, th, bundle1.P[uk + 1],
                                                 b2.lambda[uk], bundle1.beta[uk]);
    if (has_running) {
      const Mat hphi = model.running->hess_xi(xk, th);
      v -= ctrl.h * model.running->grad_xi(xk, th);
      v += ctrl.h * hphi * b2.pi[uk];
    }
    b2.phi[uk] = std::move(v);
  }
  return b2;
}

std::vector<Vec> directional_state(const Model& model, const ControlPath& ctrl,
                                   const Trajectory& traj, const Vec& dx) {
  require_shape(std::abs(dx.norm() - 1.0) < 1e-8, "direction must be a unit vector");
  const int N = ctrl.num_layers();
  std::vector<Vec> zeta(static_cast<std::size_t>(N) + 1);
  zeta[0] = dx;
  for (int k = 0; k < N; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    zeta[uk + 1] = step_matrix(model, ctrl, traj, k) * zeta[uk];
  }
  return zeta;
}

std::vector<Vec> directional_costate(const Model& model, const ControlPath& ctrl,
                                     const Trajectory& traj,
                                     const std::vector<Vec>& P,
                                     const std::vector<Vec>& zeta) {
  const int N = ctrl.num_layers();
  require_shape(static_cast<int>(zeta.size()) == N + 1, "zeta sweep size mismatch");
  const bool has_running = !model.running->is_zero();
  std::vector<Vec> eta(static_cast<std::size_t>(N) + 1);
  eta[static_cast<std::size_t>(N)] =
      -model.terminal->hess_xi(traj.states[static_cast<std::size_t>(N)], ctrl.terminal) *
      zeta[static_cast<std::size_t>(N)];
  for (int k = N - 1; k >= 0; --k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    Vec v = step_matrix(model, ctrl, traj, k).transpose() * eta[uk + 1];
    v += ctrl.h * model.dynamics->hess_contract_out(traj.states[uk], ctrl.layers[uk],
                                                    P[uk + 1]) *
         zeta[uk];
    if (has_running) {
      v -= ctrl.h * model.running->hess_xi(traj.states[uk], ctrl.layers[uk]) * zeta[uk];
    }
    eta[uk] = std::move(v);
  }
  return eta;
}

std::pair<std::vector<Vec>, std::vector<Vec>> direction_pair(
    const Model& model, const ControlPath& ctrl, const Trajectory& traj,
    const std::vector<Vec>& P, const Vec& z) {
  require_shape(std::abs(z.norm() - 1.0) < 1e-8, "direction must be a unit vector");
  const int N = ctrl.num_layers();
  const bool has_running = !model.running->is_zero();
  std::vector<Vec> gamma(static_cast<std::size_t>(N) + 1);
  gamma[0] = z;
  for (int k = 0; k < N; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    gamma[uk + 1] = step_matrix(model, ctrl, traj, k) * gamma[uk];
  }
  std::vector<Vec> rho(static_cast<std::size_t>(N) + 1);
  rho[static_cast<std::size_t>(N)] =
      model.terminal->hess_xi(traj.states[static_cast<std::size_t>(N)], ctrl.terminal) *
      gamma[static_cast<std::size_t>(N)];
  for (int k = N - 1; k >= 0; --k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    Vec v = step_matrix(model, ctrl, traj, k).transpose() * rho[uk + 1];
    v -= ctrl.h * model.dynamics->hess_contract_out(traj.states[uk], ctrl.layers[uk],
                                                    P[uk + 1]) *
         gamma[uk];
    if (has_running) {
      v += ctrl.h * model.running->hess_xi(traj.states[uk], ctrl.layers[uk]) * gamma[uk];
    }
    rho[uk] = std::move(v);
  }
  return {std::move(gamma), std::move(rho)};
}

}  // namespace wrc
