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

#include <map>
#include <string>

#include "wrc/adversary.hpp"
#include "wrc/measure.hpp"
#include "wrc/objectives.hpp"

namespace wrc {

// One verification record. pass holds exactly when rel_error <= tolerance;
// slope-style checks fold their acceptance margin into rel_error and report
// the fitted quantities in the metadata.
struct CheckReport {
  std::string name;
  double max_abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, std::string> metadata;

  void finalize() { pass = rel_error <= tolerance; }
};

// A model + control + data triple the checks run on.
struct VerifyInstance {
  Model model;
  ControlPath ctrl;
  EmpiricalMeasure mu;
  std::string descriptor;
};

// Random smooth instances with non-degenerate input gradients at every data
// point. Families rotate over the smooth dynamics/loss pairs.
std::vector<VerifyInstance> make_random_instances(int count, int dim, int layers,
                                                  double h, std::uint64_t seed);

// Control with every layer split into `factor` sublayers of step h/factor
// (the same piecewise-constant control on a finer grid).
ControlPath refine_control(const ControlPath& ctrl, int factor);

// Central finite differences of loss_j. The gradient guard estimates the
// roundoff floor; when it dominates, the estimate is recomputed with
// Richardson extrapolation and the warning flag is set.
Vec fd_input_gradient(const Model& model, const ControlPath& ctrl, const Vec& x,
                      double eps = 1e-4, bool* noise_warning = nullptr);
Mat fd_input_hessian(const Model& model, const ControlPath& ctrl, const Vec& x,
                     double eps = 1e-3);

// grad_x j = -P_0 against finite differences, on an h-refinement ladder with
// a Richardson-extrapolated fine-grid reference; checks both the error at the
// finest step and the O(h) decay slope.
CheckReport check_costate_identity(const std::vector<VerifyInstance>& instances,
                                   double tol = 1e-3);

// grad_x |P_0|^q = -q kappa ahat_0, and the Hessian form
// |grad j|^{q-2} D2j grad j = -kappa ahat_0, against finite differences.
CheckReport check_alpha_hat_identity(const std::vector<VerifyInstance>& instances,
                                     double delta, double p, double tol = 1e-3);

// grad_x (P_0 . z) = -rho_0 for random unit z, plus the curvature orientation
// rho_0 . z = +z^T D2j z it pins down.
CheckReport check_rho_identity(const std::vector<VerifyInstance>& instances,
                               std::uint64_t seed, double tol = 1e-3);

// log-log fit of |robust oracle - first-order objective| against delta.
struct SlopeFit {
  double slope = 0.0;
  double r2 = 0.0;
  bool degenerate = false;  // residuals at the noise floor; no fit possible
};
SlopeFit expansion_slope(const Model& model, const ControlPath& ctrl,
                         const EmpiricalMeasure& mu, const NormSpec& ns,
                         const std::vector<double>& delta_grid);
CheckReport expansion_order_estimate(const Model& model, const ControlPath& ctrl,
                                     const EmpiricalMeasure& mu, const NormSpec& ns,
                                     const std::vector<double>& delta_grid,
                                     double min_slope = 1.9, double min_r2 = 0.98);

// Monte Carlo curvature estimator: across-seed standard deviation should
// scale like m^{-1/2}; at d = 2 the mean is compared with angular quadrature.
CheckReport mc_curvature_convergence(const Model& model, const ControlPath& ctrl,
                                     const Vec& x, const std::vector<int>& m_grid,
                                     const std::vector<std::uint64_t>& seeds,
                                     double mean_tol = 1e-3);

// Assembled control gradients against central finite differences of the
// variant objective in every layer block and the terminal parameters.
CheckReport control_gradient_check(const Model& model, const ControlPath& ctrl,
                                   const EmpiricalMeasure& mu,
                                   RegularizerVariant variant, double delta,
                                   const NormSpec& ns, double tol = 1e-3);

// The default verification suite: all checks on d in {2,3,4}, N in {4,8}
// smooth instances. Deterministic in the seed.
std::vector<CheckReport> run_default_suite(std::uint64_t seed = 20260810ULL);

}  // namespace wrc
