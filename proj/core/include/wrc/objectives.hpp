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
#include "wrc/propagation.hpp"

namespace wrc {

enum class RegularizerVariant {
  clean,
  first_order,
  second_order_v1,
  curvature_exact,
  curvature_mc,
  fgsm
};

// Which robust objective is trained/evaluated and its knobs.
struct RegularizerSpec {
  RegularizerVariant variant = RegularizerVariant::clean;
  double delta = 0.0;      // adversary radius
  int m = 32;              // Monte Carlo directions (curvature_mc)
  double alpha_mix = 0.5;  // FGSM mixing weight, in [0, 1)
  std::uint64_t seed = 0;  // direction sampling seed
};

std::string to_string(RegularizerVariant v);
RegularizerVariant regularizer_variant_from_string(const std::string& s);

struct ObjectiveDiagnostics {
  int degenerate_gradient_samples = 0;
};

// j(x, theta) = ell(X_N, theta_N) + h * sum_k Phi(X_k, theta_k).
double loss_j(const Model& model, const ControlPath& ctrl, const Vec& x);

// J(mu, theta): weighted mean of loss_j.
double risk(const Model& model, const ControlPath& ctrl, const EmpiricalMeasure& mu);

// J + delta * (E |grad_x j|_*^q)^{1/q}; the gradient is -P_0 per sample.
double first_order_objective(const Model& model, const ControlPath& ctrl,
                             const EmpiricalMeasure& mu, double delta,
                             const NormSpec& ns);

// First-order objective plus the gradient-direction curvature term
// (delta/2) E[|P_0|^{q-2} ahat_0 . P_0] / (E |P_0|^q)^{1/p}, assembled from
// adjoints only. Euclidean ground norm. Samples with P_0 = 0 contribute zero
// and are counted in the diagnostics.
double second_order_v1_objective(const Model& model, const ControlPath& ctrl,
                                 const EmpiricalMeasure& mu, double delta,
                                 const NormSpec& ns,
                                 ObjectiveDiagnostics* diag = nullptr);

// J + (delta^2/2) * (E[(lambda_max)_+^{q~}])^{1/q~}, dense Hessians assembled
// from d direction pairs per sample. Refuses d above the cap.
double curvature_exact_objective(const Model& model, const ControlPath& ctrl,
                                 const EmpiricalMeasure& mu, double delta,
                                 const NormSpec& ns, int dim_cap = 32);

// Monte Carlo variant: J + (delta^2/2) * (E_x[{(1/m) sum_i (z_i^T D2j z_i)_+}^{q~}])^{1/q~}
// with z_i drawn once from the seeded generator and shared across the batch.
double curvature_mc_objective(const Model& model, const ControlPath& ctrl,
                              const EmpiricalMeasure& mu, double delta,
                              const NormSpec& ns, int m, std::uint64_t seed);

// FGSM inner point x + delta * sign(grad_x j(x, theta)).
Vec fgsm_point(const Model& model, const ControlPath& ctrl, const Vec& x, double delta);

// alpha * J(mu) + (1 - alpha) * J(mu perturbed by fgsm_point).
double fgsm_objective(const Model& model, const ControlPath& ctrl,
                      const EmpiricalMeasure& mu, double delta, double alpha_mix);

// Value, clean risk and regularization term of the configured variant
// (objective = clean_risk + reg_term).
struct ObjectiveBreakdown {
  double objective = 0.0;
  double clean_risk = 0.0;
  double reg_term = 0.0;
  ObjectiveDiagnostics diag;
};
ObjectiveBreakdown objective_value(const Model& model, const ControlPath& ctrl,
                                   const EmpiricalMeasure& mu,
                                   const RegularizerSpec& reg, const NormSpec& ns);

// Exact gradient of the batch objective with respect to every layer block and
// the terminal parameters.
struct ControlGradient {
  std::vector<Vec> layers;
  Vec terminal;

  double max_layer_norm() const;
};

// Per-sample Hamiltonian gradient for layer k of the first-order system,
// including the step factor h so that batch means differentiate the discrete
// objective exactly:
//   h * (grad_th Phi - D_th f^T alpha_{k+1} + C_{th,xi}(P_{k+1}, beta_k)).
Vec hamiltonian_control_gradient(const Model& model, const ControlPath& ctrl, int k,
                                 const Trajectory& traj, const AdjointBundle1& b1);

// Second-order analogue driven by the bundle-2 adjoints.
Vec hamiltonian_control_gradient2(const Model& model, const ControlPath& ctrl, int k,
                                  const Trajectory& traj, const AdjointBundle1& b1,
                                  const AdjointBundle2& b2);

// E[grad_th ell - C_{th,xi} ell(beta_N)]: gradient of the first-order
// objective in the terminal parameters.
Vec terminal_parameter_gradient(const Model& model, const ControlPath& ctrl,
                                const EmpiricalMeasure& mu, double delta,
                                const NormSpec& ns);

// Batch objective gradient for the trainable variants: clean, first_order,
// second_order_v1 (p = inf), fgsm (perturbation frozen).
struct GradientRequest {
  RegularizerVariant variant = RegularizerVariant::clean;
  double delta = 0.0;
  NormSpec ns;
  double alpha_mix = 0.5;
  // Def-beta statistics scope: when set, these replace the batch-computed
  // statistics (full-dataset stabilization for small batches at finite p).
  std::optional<BatchStats> stats_override;
};
ControlGradient control_gradient(const Model& model, const ControlPath& ctrl,
                                 const EmpiricalMeasure& batch,
                                 const GradientRequest& req,
                                 ObjectiveDiagnostics* diag = nullptr);

}  // namespace wrc
