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

#include <memory>
#include <string>

#include "wrc/norms.hpp"
#include "wrc/types.hpp"

namespace wrc {

enum class DynamicsFamily { tanh_resnet, relu_resnet, regression_frozen_label, zero };
enum class TerminalFamily { squared_regression, quadratic_to_target, logistic_margin };
enum class RunningFamily { zero, ridge_on_params };

struct DynamicsSpec {
  DynamicsFamily family = DynamicsFamily::tanh_resnet;
  int dim = 2;  // state dimension d
};

struct LossSpec {
  TerminalFamily terminal = TerminalFamily::squared_regression;
  RunningFamily running = RunningFamily::zero;
  double ridge_coeff = 0.0;  // coefficient of ridge_on_params
};

// Per-layer parameter blocks theta_0..theta_{N-1}, terminal-loss parameters
// theta_N, and the step size h. Depth T = N * h.
struct ControlPath {
  std::vector<Vec> layers;
  Vec terminal;
  double h = 0.1;

  int num_layers() const { return static_cast<int>(layers.size()); }
  double depth() const { return h * static_cast<double>(layers.size()); }
};

// Analytic derivative oracle for one dynamics family. Layer parameters are
// flattened vectors; see each family for the layout. Index conventions:
//   jacobian_xi(i, j)          = df_i / dxi_j
//   hessian_xi[i](j, k)        = d2 f_i / dxi_j dxi_k
//   third_xi[i][j](k, l)       = d3 f_i / dxi_j dxi_k dxi_l
//   jacobian_theta(i, a)       = df_i / dtheta_a
// The contract_* overloads evaluate the common contractions of these tensors
// in closed form; they must agree with contracting the dense tensors.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  int dim() const { return dim_; }
  int param_dim() const { return param_dim_; }
  virtual DynamicsFamily family() const = 0;

  virtual Vec eval(const Vec& xi, const Vec& theta) const = 0;
  virtual Mat jacobian_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Tensor3 hessian_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Tensor4 third_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Mat jacobian_theta(const Vec& xi, const Vec& theta) const = 0;

  // sum_i u_i Hess f_i  (d x d, symmetric)
  virtual Mat hess_contract_out(const Vec& xi, const Vec& theta, const Vec& u) const = 0;
  // component i: u^T Hess f_i v
  virtual Vec hess_contract_in(const Vec& xi, const Vec& theta, const Vec& u,
                               const Vec& v) const = 0;
  // component c: sum_{i,j,k} w_i u_j v_k d3 f_i / dxi_j dxi_k dxi_c
  virtual Vec third_contract(const Vec& xi, const Vec& theta, const Vec& w,
                             const Vec& u, const Vec& v) const = 0;
  // (D_theta f)^T u
  virtual Vec dtheta_contract(const Vec& xi, const Vec& theta, const Vec& u) const = 0;
  // component a: sum_{i,j} u_i v_j d2 f_i / dtheta_a dxi_j
  virtual Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u,
                                  const Vec& v) const = 0;
  // component a: sum_{i,j,k} w_i u_j v_k d3 f_i / dtheta_a dxi_j dxi_k
  virtual Vec dtheta_dxi2_contract(const Vec& xi, const Vec& theta, const Vec& w,
                                   const Vec& u, const Vec& v) const = 0;

  void check_state(const Vec& xi) const;
  void check_params(const Vec& theta) const;

 protected:
  Dynamics(int dim, int param_dim) : dim_(dim), param_dim_(param_dim) {}
  int dim_;
  int param_dim_;
};

// Terminal cost ell(xi, theta) with analytic derivatives up to third order
// in xi and the mixed theta-xi orders the training gradients need.
class TerminalLoss {
 public:
  virtual ~TerminalLoss() = default;

  int dim() const { return dim_; }
  int param_dim() const { return param_dim_; }
  virtual TerminalFamily family() const = 0;

  virtual double eval(const Vec& xi, const Vec& theta) const = 0;
  virtual Vec grad_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Mat hess_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Tensor3 third_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Vec grad_theta(const Vec& xi, const Vec& theta) const = 0;
  // component a: sum_j u_j d2 ell / dtheta_a dxi_j
  virtual Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u) const = 0;
  // component a: sum_{j,k} u_j v_k d3 ell / dtheta_a dxi_j dxi_k
  virtual Vec dtheta_dxi2_contract(const Vec& xi, const Vec& theta, const Vec& u,
                                   const Vec& v) const = 0;
  // component c: sum_{j,k} u_j v_k d3 ell / dxi_j dxi_k dxi_c
  virtual Vec third_contract(const Vec& xi, const Vec& theta, const Vec& u,
                             const Vec& v) const = 0;

  void check_state(const Vec& xi) const;
  void check_params(const Vec& theta) const;

 protected:
  TerminalLoss(int dim, int param_dim) : dim_(dim), param_dim_(param_dim) {}
  int dim_;
  int param_dim_;
};

// Running cost Phi(xi, theta). The shipped families do not depend on xi, so
// their xi-derivatives vanish identically; the propagation code still carries
// the terms.
class RunningCost {
 public:
  virtual ~RunningCost() = default;
  virtual RunningFamily family() const = 0;
  virtual double eval(const Vec& xi, const Vec& theta) const = 0;
  virtual Vec grad_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Mat hess_xi(const Vec& xi, const Vec& theta) const = 0;
  virtual Vec grad_theta(const Vec& xi, const Vec& theta) const = 0;
  // component a: sum_j u_j d2 Phi / dtheta_a dxi_j
  virtual Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u) const = 0;
  virtual bool is_zero() const = 0;
};

// Dynamics + costs for a fixed state dimension. All members are immutable and
// safe to share across threads.
struct Model {
  std::shared_ptr<const Dynamics> dynamics;
  std::shared_ptr<const TerminalLoss> terminal;
  std::shared_ptr<const RunningCost> running;

  int dim() const { return dynamics->dim(); }
};

Model make_model(const DynamicsSpec& dspec, const LossSpec& lspec);

// Zero-initialized control with N layers of step h, shaped for the model.
ControlPath make_zero_control(const Model& model, int num_layers, double h);

void validate_control(const Model& model, const ControlPath& ctrl);

std::string to_string(DynamicsFamily f);
std::string to_string(TerminalFamily f);
std::string to_string(RunningFamily f);
DynamicsFamily dynamics_family_from_string(const std::string& s);
TerminalFamily terminal_family_from_string(const std::string& s);
RunningFamily running_family_from_string(const std::string& s);

// Dense reference contractions used to cross-check the closed forms.
Mat contract_hess_out(const Tensor3& H, const Vec& u);
Vec contract_hess_in(const Tensor3& H, const Vec& u, const Vec& v);
Vec contract_third(const Tensor4& T, const Vec& w, const Vec& u, const Vec& v);

}  // namespace wrc
