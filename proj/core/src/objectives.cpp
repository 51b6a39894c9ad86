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

#include "wrc/objectives.hpp"

#include <cmath>

#include "wrc/parallel.hpp"
#include "wrc/rng.hpp"

namespace wrc {

std::string to_string(RegularizerVariant v) {
  switch (v) {
    case RegularizerVariant::clean: return "clean";
    case RegularizerVariant::first_order: return "first_order";
    case RegularizerVariant::second_order_v1: return "second_order_v1";
    case RegularizerVariant::curvature_exact: return "curvature_exact";
    case RegularizerVariant::curvature_mc: return "curvature_mc";
    case RegularizerVariant::fgsm: return "fgsm";
  }
  return "?";
}

RegularizerVariant regularizer_variant_from_string(const std::string& s) {
  if (s == "clean") return RegularizerVariant::clean;
  if (s == "first_order") return RegularizerVariant::first_order;
  if (s == "second_order_v1") return RegularizerVariant::second_order_v1;
  if (s == "curvature_exact") return RegularizerVariant::curvature_exact;
  if (s == "curvature_mc") return RegularizerVariant::curvature_mc;
  if (s == "fgsm") return RegularizerVariant::fgsm;
  throw ConfigError("unknown regularizer variant: " + s);
}

double loss_j(const Model& model, const ControlPath& ctrl, const Vec& x) {
  const Trajectory traj = forward_state(model, ctrl, x);
  double value = model.terminal->eval(traj.states.back(), ctrl.terminal);
  if (!model.running->is_zero()) {
    double run = 0.0;
    for (int k = 0; k < ctrl.num_layers(); ++k) {
      const std::size_t uk = static_cast<std::size_t>(k);
      run += model.running->eval(traj.states[uk], ctrl.layers[uk]);
    }
    value += ctrl.h * run;
  }
  return value;
}

double risk(const Model& model, const ControlPath& ctrl, const EmpiricalMeasure& mu) {
  if (mu.size() == 0) throw ConfigError("risk of an empty measure is undefined");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += mu.weights[i] * loss_j(model, ctrl, mu.points[i]);
  }
  return acc;
}

namespace {

struct SampleSweep {
  Trajectory traj;
  std::vector<Vec> P;
  double j = 0.0;
};

SampleSweep sweep_sample(const Model& model, const ControlPath& ctrl, const Vec& x) {
  SampleSweep s;
  s.traj = forward_state(model, ctrl, x);
  s.P = backward_costate(model, ctrl, s.traj);
  s.j = model.terminal->eval(s.traj.states.back(), ctrl.terminal);
  if (!model.running->is_zero()) {
    double run = 0.0;
    for (int k = 0; k < ctrl.num_layers(); ++k) {
      const std::size_t uk = static_cast<std::size_t>(k);
      run += model.running->eval(s.traj.states[uk], ctrl.layers[uk]);
    }
    s.j += ctrl.h * run;
  }
  return s;
}

std::vector<SampleSweep> sweep_measure(const Model& model, const ControlPath& ctrl,
                                       const EmpiricalMeasure& mu) {
  if (mu.size() == 0) throw ConfigError("objective of an empty measure is undefined");
  std::vector<SampleSweep> sweeps(mu.size());
  parallel_for(mu.size(), [&](std::size_t i) {
    sweeps[i] = sweep_sample(model, ctrl, mu.points[i]);
  });
  return sweeps;
}

double first_order_reg(const std::vector<SampleSweep>& sweeps,
                       const EmpiricalMeasure& mu, double delta, const NormSpec& ns) {
  std::vector<double> dual(sweeps.size());
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    dual[i] = dual_norm(sweeps[i].P[0], ns);
  }
  return delta * power_mean(dual, mu.weights, ns.q);
}

}  // namespace

double first_order_objective(const Model& model, const ControlPath& ctrl,
                             const EmpiricalMeasure& mu, double delta,
                             const NormSpec& ns) {
  const auto sweeps = sweep_measure(model, ctrl, mu);
  double J = 0.0;
  for (std::size_t i = 0; i < sweeps.size(); ++i) J += mu.weights[i] * sweeps[i].j;
  return J + first_order_reg(sweeps, mu, delta, ns);
}

double second_order_v1_objective(const Model& model, const ControlPath& ctrl,
                                 const EmpiricalMeasure& mu, double delta,
                                 const NormSpec& ns, ObjectiveDiagnostics* diag) {
  if (ns.ground != GroundNorm::euclidean) {
    throw CapabilityError("second_order_v1 objective requires the Euclidean ground norm");
  }
  const auto sweeps = sweep_measure(model, ctrl, mu);
  double J = 0.0;
  std::vector<Vec> P0s(sweeps.size());
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    J += mu.weights[i] * sweeps[i].j;
    P0s[i] = sweeps[i].P[0];
  }
  const BatchStats stats = make_batch_stats(P0s, mu.weights, delta, ns);

  double quad = 0.0;
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    const double nrm = P0s[i].norm();
    if (nrm == 0.0) {
      if (diag) ++diag->degenerate_gradient_samples;
      continue;  // 0/0 = 0 convention
    }
    const auto beta =
        forward_beta(model, ctrl, sweeps[i].traj, P0s[i], stats, delta, ns);
    const auto [alpha, ahat] = backward_alpha(model, ctrl, sweeps[i].traj,
                                              sweeps[i].P, beta);
    quad += mu.weights[i] * std::pow(nrm, ns.q - 2.0) * ahat[0].dot(P0s[i]);
  }
  const double denom =
      ns.p_finite() ? std::pow(stats.mean_dual_q, 1.0 / ns.p) : 1.0;
  const double quad_term =
      (delta == 0.0 || stats.mean_dual_q == 0.0) ? 0.0 : 0.5 * delta * quad / denom;
  return J + first_order_reg(sweeps, mu, delta, ns) + quad_term;
}

namespace {

// z^T D2_x j(x) z for one sample via the (gamma, rho) pair: rho_0 . z.
double quad_form(const Model& model, const ControlPath& ctrl, const SampleSweep& s,
                 const Vec& z) {
  const auto [gamma, rho] = direction_pair(model, ctrl, s.traj, s.P, z);
  return rho[0].dot(z);
}

}  // namespace

double curvature_exact_objective(const Model& model, const ControlPath& ctrl,
                                 const EmpiricalMeasure& mu, double delta,
                                 const NormSpec& ns, int dim_cap) {
  const int d = model.dim();
  if (d > dim_cap) {
    throw CapabilityError("curvature_exact assembles dense Hessians; state "
                          "dimension exceeds the configured cap");
  }
  const auto sweeps = sweep_measure(model, ctrl, mu);
  double J = 0.0;
  std::vector<double> lmax_pos(sweeps.size());
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    J += mu.weights[i] * sweeps[i].j;
    Mat H(d, d);
    for (int c = 0; c < d; ++c) {
      const auto [gamma, rho] =
          direction_pair(model, ctrl, sweeps[i].traj, sweeps[i].P, Vec::Unit(d, c));
      H.col(c) = rho[0];
    }
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> eig(H, Eigen::EigenvaluesOnly);
    lmax_pos[i] = std::max(0.0, eig.eigenvalues().maxCoeff());
  }
  return J + 0.5 * delta * delta * power_mean(lmax_pos, mu.weights, ns.q_tilde);
}

double curvature_mc_objective(const Model& model, const ControlPath& ctrl,
                              const EmpiricalMeasure& mu, double delta,
                              const NormSpec& ns, int m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("curvature_mc needs at least one direction");
  if (ns.ground != GroundNorm::euclidean) {
    throw CapabilityError("curvature_mc requires the Euclidean ground norm");
  }
  const int d = model.dim();
  Rng rng(seed);
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) dirs.push_back(rng.unit_sphere(d));

  const auto sweeps = sweep_measure(model, ctrl, mu);
  double J = 0.0;
  std::vector<double> avg(sweeps.size());
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    J += mu.weights[i] * sweeps[i].j;
    double acc = 0.0;
    for (const Vec& z : dirs) {
      acc += std::max(0.0, quad_form(model, ctrl, sweeps[i], z));
    }
    avg[i] = acc / static_cast<double>(m);
  }
  return J + 0.5 * delta * delta * power_mean(avg, mu.weights, ns.q_tilde);
}

Vec fgsm_point(const Model& model, const ControlPath& ctrl, const Vec& x, double delta) {
  const SampleSweep s = sweep_sample(model, ctrl, x);
  return x + delta * sign_vec(-s.P[0]);
}

double fgsm_objective(const Model& model, const ControlPath& ctrl,
                      const EmpiricalMeasure& mu, double delta, double alpha_mix) {
  double clean = 0.0, pert = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const SampleSweep s = sweep_sample(model, ctrl, mu.points[i]);
    clean += mu.weights[i] * s.j;
    pert += mu.weights[i] *
            loss_j(model, ctrl, mu.points[i] + delta * sign_vec(-s.P[0]));
  }
  return alpha_mix * clean + (1.0 - alpha_mix) * pert;
}

ObjectiveBreakdown objective_value(const Model& model, const ControlPath& ctrl,
                                   const EmpiricalMeasure& mu,
                                   const RegularizerSpec& reg, const NormSpec& ns) {
  ObjectiveBreakdown out;
  out.clean_risk = risk(model, ctrl, mu);
  switch (reg.variant) {
    case RegularizerVariant::clean:
      out.objective = out.clean_risk;
      break;
    case RegularizerVariant::first_order:
      out.objective = first_order_objective(model, ctrl, mu, reg.delta, ns);
      break;
    case RegularizerVariant::second_order_v1:
      out.objective =
          second_order_v1_objective(model, ctrl, mu, reg.delta, ns, &out.diag);
      break;
    case RegularizerVariant::curvature_exact:
      out.objective = curvature_exact_objective(model, ctrl, mu, reg.delta, ns);
      break;
    case RegularizerVariant::curvature_mc:
      out.objective =
          curvature_mc_objective(model, ctrl, mu, reg.delta, ns, reg.m, reg.seed);
      break;
    case RegularizerVariant::fgsm:
      out.objective = fgsm_objective(model, ctrl, mu, reg.delta, reg.alpha_mix);
      break;
  }
  out.reg_term = out.objective - out.clean_risk;
  return out;
}

double ControlGradient::max_layer_norm() const {
  double m = 0.0;
  for (const Vec& g : layers) m = std::max(m, g.norm());
  m = std::max(m, terminal.norm());
  return m;
}

Vec hamiltonian_control_gradient(const Model& model, const ControlPath& ctrl, int k,
                                 const Trajectory& traj, const AdjointBundle1& b1) {
  require_shape(k >= 0 && k < ctrl.num_layers(), "layer index out of range");
  const std::size_t uk = static_cast<std::size_t>(k);
  const Vec& xk = traj.states[uk];
  const Vec& th = ctrl.layers[uk];
  Vec g = -model.dynamics->dtheta_contract(xk, th, b1.alpha[uk + 1]) +
          model.dynamics->dtheta_dxi_contract(xk, th, b1.P[uk + 1], b1.beta[uk]);
  if (!model.running->is_zero()) {
    g += model.running->grad_theta(xk, th);
    g -= model.running->dtheta_dxi_contract(xk, th, b1.beta[uk]);
  }
  return ctrl.h * g;
}

Vec hamiltonian_control_gradient2(const Model& model, const ControlPath& ctrl, int k,
                                  const Trajectory& traj, const AdjointBundle1& b1,
                                  const AdjointBundle2& b2) {
  require_shape(k >= 0 && k < ctrl.num_layers(), "layer index out of range");
  const std::size_t uk = static_cast<std::size_t>(k);
  const Vec& xk = traj.states[uk];
  const Vec& th = ctrl.layers[uk];
  Vec g = -model.dynamics->dtheta_contract(xk, th, b2.phi[uk + 1]) +
          model.dynamics->dtheta_dxi_contract(xk, th, b1.P[uk + 1], b2.pi[uk]) -
          0.5 * model.dynamics->dtheta_dxi_contract(xk, th, b2.psi[uk + 1], b1.beta[uk]) +
          model.dynamics->dtheta_dxi_contract(xk, th, b1.alpha_hat[uk + 1], b2.lambda[uk]) -
          model.dynamics->dtheta_dxi2_contract(xk, th, b1.P[uk + 1], b2.lambda[uk],
                                               b1.beta[uk]);
  if (!model.running->is_zero()) {
    g += model.running->grad_theta(xk, th);
    g -= model.running->dtheta_dxi_contract(xk, th, b2.pi[uk]);
  }
  return ctrl.h * g;
}

Vec terminal_parameter_gradient(const Model& model, const ControlPath& ctrl,
                                const EmpiricalMeasure& mu, double delta,
                                const NormSpec& ns) {
  const auto sweeps = sweep_measure(model, ctrl, mu);
  std::vector<Vec> P0s(sweeps.size());
  for (std::size_t i = 0; i < sweeps.size(); ++i) P0s[i] = sweeps[i].P[0];
  const BatchStats stats = make_batch_stats(P0s, mu.weights, delta, ns);

  Vec g = Vec::Zero(model.terminal->param_dim());
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    const Vec& XN = sweeps[i].traj.states.back();
    const auto beta =
        forward_beta(model, ctrl, sweeps[i].traj, P0s[i], stats, delta, ns);
    g += mu.weights[i] *
         (model.terminal->grad_theta(XN, ctrl.terminal) -
          model.terminal->dtheta_dxi_contract(XN, ctrl.terminal, beta.back()));
  }
  return g;
}

namespace {

// Clean (beta = 0) per-sample contribution added into an accumulator.
void accumulate_clean_gradient(const Model& model, const ControlPath& ctrl,
                               const Vec& x, double weight, ControlGradient& acc) {
  const SampleSweep s = sweep_sample(model, ctrl, x);
  for (int k = 0; k < ctrl.num_layers(); ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    const Vec& xk = s.traj.states[uk];
    const Vec& th = ctrl.layers[uk];
    Vec g = -model.dynamics->dtheta_contract(xk, th, s.P[uk + 1]);
    if (!model.running->is_zero()) g += model.running->grad_theta(xk, th);
    acc.layers[uk] += weight * ctrl.h * g;
  }
  acc.terminal +=
      weight * model.terminal->grad_theta(s.traj.states.back(), ctrl.terminal);
}

}  // namespace

ControlGradient control_gradient(const Model& model, const ControlPath& ctrl,
                                 const EmpiricalMeasure& batch,
                                 const GradientRequest& req,
                                 ObjectiveDiagnostics* diag) {
  validate_control(model, ctrl);
  const int N = ctrl.num_layers();
  ControlGradient acc;
  acc.layers.assign(static_cast<std::size_t>(N),
                    Vec::Zero(model.dynamics->param_dim()));
  acc.terminal = Vec::Zero(model.terminal->param_dim());

  const bool clean_like =
      req.variant == RegularizerVariant::clean || req.delta == 0.0;

  if (clean_like) {
    std::vector<ControlGradient> parts(batch.size());
    parallel_for(batch.size(), [&](std::size_t i) {
      parts[i].layers.assign(static_cast<std::size_t>(N),
                             Vec::Zero(model.dynamics->param_dim()));
      parts[i].terminal = Vec::Zero(model.terminal->param_dim());
      accumulate_clean_gradient(model, ctrl, batch.points[i], 1.0, parts[i]);
    });
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (int k = 0; k < N; ++k) {
        acc.layers[static_cast<std::size_t>(k)] +=
            batch.weights[i] * parts[i].layers[static_cast<std::size_t>(k)];
      }
      acc.terminal += batch.weights[i] * parts[i].terminal;
    }
    return acc;
  }

  const auto reduce_parts = [&](const std::vector<ControlGradient>& parts) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (int k = 0; k < N; ++k) {
        acc.layers[static_cast<std::size_t>(k)] +=
            batch.weights[i] * parts[i].layers[static_cast<std::size_t>(k)];
      }
      acc.terminal += batch.weights[i] * parts[i].terminal;
    }
  };

  switch (req.variant) {
    case RegularizerVariant::first_order: {
      const auto sweeps = sweep_measure(model, ctrl, batch);
      std::vector<Vec> P0s(sweeps.size());
      for (std::size_t i = 0; i < sweeps.size(); ++i) P0s[i] = sweeps[i].P[0];
      const BatchStats stats =
          req.stats_override ? *req.stats_override
                             : make_batch_stats(P0s, batch.weights, req.delta, req.ns);
      std::vector<ControlGradient> parts(sweeps.size());
      parallel_for(sweeps.size(), [&](std::size_t i) {
        const auto beta = forward_beta(model, ctrl, sweeps[i].traj, P0s[i], stats,
                                       req.delta, req.ns);
        const auto [alpha, ahat] =
            backward_alpha(model, ctrl, sweeps[i].traj, sweeps[i].P, beta);
        AdjointBundle1 b1{sweeps[i].P, beta, alpha, ahat};
        parts[i].layers.resize(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k) {
          parts[i].layers[static_cast<std::size_t>(k)] =
              hamiltonian_control_gradient(model, ctrl, k, sweeps[i].traj, b1);
        }
        const Vec& XN = sweeps[i].traj.states.back();
        parts[i].terminal = model.terminal->grad_theta(XN, ctrl.terminal) -
                            model.terminal->dtheta_dxi_contract(XN, ctrl.terminal,
                                                                beta.back());
      });
      reduce_parts(parts);
      return acc;
    }
    case RegularizerVariant::second_order_v1: {
      if (req.ns.p_finite()) {
        throw CapabilityError("second-order training gradient is defined for p = inf");
      }
      std::vector<ControlGradient> parts(batch.size());
      std::vector<int> degenerate(batch.size(), 0);
      parallel_for(batch.size(), [&](std::size_t i) {
        const SampleSweep s = sweep_sample(model, ctrl, batch.points[i]);
        parts[i].layers.assign(static_cast<std::size_t>(N),
                               Vec::Zero(model.dynamics->param_dim()));
        parts[i].terminal = Vec::Zero(model.terminal->param_dim());
        if (s.P[0].norm() == 0.0) {
          // Degenerate gradient: the sample contributes its clean term only.
          degenerate[i] = 1;
          accumulate_clean_gradient(model, ctrl, batch.points[i], 1.0, parts[i]);
          return;
        }
        const BatchStats stats = make_batch_stats({s.P[0]}, {1.0}, req.delta, req.ns);
        const auto beta =
            forward_beta(model, ctrl, s.traj, s.P[0], stats, req.delta, req.ns);
        const auto [alpha, ahat] = backward_alpha(model, ctrl, s.traj, s.P, beta);
        AdjointBundle1 b1{s.P, beta, alpha, ahat};
        const AdjointBundle2 b2 =
            second_order_sweeps(model, ctrl, s.traj, b1, req.delta, req.ns);
        for (int k = 0; k < N; ++k) {
          parts[i].layers[static_cast<std::size_t>(k)] =
              hamiltonian_control_gradient2(model, ctrl, k, s.traj, b1, b2);
        }
        const Vec& XN = s.traj.states.back();
        parts[i].terminal =
            model.terminal->grad_theta(XN, ctrl.terminal) -
            model.terminal->dtheta_dxi_contract(XN, ctrl.terminal, b2.pi.back()) +
            model.terminal->dtheta_dxi2_contract(XN, ctrl.terminal, b2.lambda.back(),
                                                 b1.beta.back());
      });
      if (diag) {
        for (int dg : degenerate) diag->degenerate_gradient_samples += dg;
      }
      reduce_parts(parts);
      return acc;
    }
    case RegularizerVariant::fgsm: {
      // Perturbed points are rebuilt from the current control and then frozen;
      // the gradient does not flow through the perturbation map.
      std::vector<ControlGradient> parts(batch.size());
      parallel_for(batch.size(), [&](std::size_t i) {
        const SampleSweep s = sweep_sample(model, ctrl, batch.points[i]);
        const Vec xt = batch.points[i] + req.delta * sign_vec(-s.P[0]);
        parts[i].layers.assign(static_cast<std::size_t>(N),
                               Vec::Zero(model.dynamics->param_dim()));
        parts[i].terminal = Vec::Zero(model.terminal->param_dim());
        accumulate_clean_gradient(model, ctrl, batch.points[i], req.alpha_mix, parts[i]);
        accumulate_clean_gradient(model, ctrl, xt, 1.0 - req.alpha_mix, parts[i]);
      });
      reduce_parts(parts);
      return acc;
    }
    default:
      throw CapabilityError(
          "control gradients are provided for clean, first_order, "
          "second_order_v1 and fgsm variants");
  }
}

}  // namespace wrc
