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

#include "wrc/model.hpp"

#include <cmath>

namespace wrc {

void Dynamics::check_state(const Vec& xi) const {
  require_shape(xi.size() == dim_, "state vector has wrong dimension");
}
void Dynamics::check_params(const Vec& theta) const {
  require_shape(theta.size() == param_dim_, "layer parameter block has wrong dimension");
}
void TerminalLoss::check_state(const Vec& xi) const {
  require_shape(xi.size() == dim_, "state vector has wrong dimension");
}
void TerminalLoss::check_params(const Vec& theta) const {
  require_shape(theta.size() == param_dim_, "terminal parameter block has wrong dimension");
}

namespace {

enum class Activation { tanh_act, relu_act };

// sigma, sigma', sigma'', sigma''' evaluated coordinatewise. The ReLU branch
// uses the relaxed derivative 1{z > 0}, with the tie at z = 0 mapped to 0,
// and vanishing higher orders.
struct ActDerivs {
  Vec s0, s1, s2, s3;
};

ActDerivs act_derivs(Activation a, const Vec& z) {
  const Eigen::Index n = z.size();
  ActDerivs out{Vec(n), Vec(n), Vec(n), Vec(n)};
  if (a == Activation::tanh_act) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = std::tanh(z[i]);
      const double c = 1.0 - t * t;
      out.s0[i] = t;
      out.s1[i] = c;
      out.s2[i] = -2.0 * t * c;
      out.s3[i] = c * (6.0 * t * t - 2.0);
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      out.s0[i] = z[i] > 0.0 ? z[i] : 0.0;
      out.s1[i] = z[i] > 0.0 ? 1.0 : 0.0;
      out.s2[i] = 0.0;
      out.s3[i] = 0.0;
    }
  }
  return out;
}

// f(xi, theta) = sigma(W xi + b) acting on all d coordinates.
// Parameter layout: theta = [vec(W) column-major, b], size d*d + d.
class SigmaResnet final : public Dynamics {
 public:
  SigmaResnet(int dim, Activation act, DynamicsFamily fam)
      : Dynamics(dim, dim * dim + dim), act_(act), fam_(fam) {}

  DynamicsFamily family() const override { return fam_; }

  Vec eval(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return act_derivs(act_, pre(xi, theta)).s0;
  }

  Mat jacobian_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    return d.s1.asDiagonal() * W;
  }

  Tensor3 hessian_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    Tensor3 H(dim_);
    for (int i = 0; i < dim_; ++i) {
      H[i] = d.s2[i] * (W.row(i).transpose() * W.row(i));
    }
    return H;
  }

  Tensor4 third_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    Tensor4 T(dim_);
    for (int i = 0; i < dim_; ++i) {
      T[i].resize(dim_);
      const Mat outer = W.row(i).transpose() * W.row(i);
      for (int j = 0; j < dim_; ++j) {
        T[i][j] = d.s3[i] * W(i, j) * outer;
      }
    }
    return T;
  }

  Mat jacobian_theta(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    Mat J = Mat::Zero(dim_, param_dim_);
    for (int b = 0; b < dim_; ++b) {
      for (int a = 0; a < dim_; ++a) {
        J(a, a + b * dim_) = d.s1[a] * xi[b];  // dW_{ab}
      }
    }
    for (int a = 0; a < dim_; ++a) J(a, dim_ * dim_ + a) = d.s1[a];  // db_a
    return J;
  }

  Mat hess_contract_out(const Vec& xi, const Vec& theta, const Vec& u) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    return W.transpose() * (u.cwiseProduct(d.s2)).asDiagonal() * W;
  }

  Vec hess_contract_in(const Vec& xi, const Vec& theta, const Vec& u,
                       const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    return d.s2.cwiseProduct(W * u).cwiseProduct(W * v);
  }

  Vec third_contract(const Vec& xi, const Vec& theta, const Vec& w, const Vec& u,
                     const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    const Vec core = w.cwiseProduct(d.s3).cwiseProduct(W * u).cwiseProduct(W * v);
    return W.transpose() * core;
  }

  Vec dtheta_contract(const Vec& xi, const Vec& theta, const Vec& u) const override {
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    const Vec us1 = u.cwiseProduct(d.s1);
    Vec g(param_dim_);
    Eigen::Map<Mat>(g.data(), dim_, dim_) = us1 * xi.transpose();
    g.tail(dim_) = us1;
    return g;
  }

  Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u,
                          const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    const Vec us2Wv = u.cwiseProduct(d.s2).cwiseProduct(W * v);
    Vec g(param_dim_);
    Eigen::Map<Mat>(g.data(), dim_, dim_) =
        us2Wv * xi.transpose() + u.cwiseProduct(d.s1) * v.transpose();
    g.tail(dim_) = us2Wv;
    return g;
  }

  Vec dtheta_dxi2_contract(const Vec& xi, const Vec& theta, const Vec& w,
                           const Vec& u, const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(act_, pre(xi, theta));
    const Vec Wu = W * u;
    const Vec Wv = W * v;
    const Vec ws3 = w.cwiseProduct(d.s3).cwiseProduct(Wu).cwiseProduct(Wv);
    const Vec ws2 = w.cwiseProduct(d.s2);
    Vec g(param_dim_);
    Eigen::Map<Mat>(g.data(), dim_, dim_) = ws3 * xi.transpose() +
                                            ws2.cwiseProduct(Wv) * u.transpose() +
                                            ws2.cwiseProduct(Wu) * v.transpose();
    g.tail(dim_) = ws3;
    return g;
  }

 private:
  Vec pre(const Vec& xi, const Vec& theta) const {
    return weights(theta) * xi + theta.tail(dim_);
  }
  Mat weights(const Vec& theta) const {
    return Eigen::Map<const Mat>(theta.data(), dim_, dim_);
  }

  Activation act_;
  DynamicsFamily fam_;
};

// Regression dynamics: xi = (v, y), f(xi, theta) = (tanh(W v), 0) with W a
// (d-1) x (d-1) matrix. The label coordinate is carried unchanged.
// Parameter layout: theta = vec(W) column-major, size (d-1)^2.
class FrozenLabelResnet final : public Dynamics {
 public:
  explicit FrozenLabelResnet(int dim) : Dynamics(dim, (dim - 1) * (dim - 1)), e_(dim - 1) {}

  DynamicsFamily family() const override { return DynamicsFamily::regression_frozen_label; }

  Vec eval(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    Vec out = Vec::Zero(dim_);
    out.head(e_) = act_derivs(Activation::tanh_act, pre(xi, theta)).s0;
    return out;
  }

  Mat jacobian_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    Mat J = Mat::Zero(dim_, dim_);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    J.topLeftCorner(e_, e_) = d.s1.asDiagonal() * weights(theta);
    return J;
  }

  Tensor3 hessian_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    Tensor3 H(dim_, Mat::Zero(dim_, dim_));
    for (int i = 0; i < e_; ++i) {
      H[i].topLeftCorner(e_, e_) = d.s2[i] * (W.row(i).transpose() * W.row(i));
    }
    return H;
  }

  Tensor4 third_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    Tensor4 T(dim_, Tensor3(dim_, Mat::Zero(dim_, dim_)));
    for (int i = 0; i < e_; ++i) {
      const Mat outer = W.row(i).transpose() * W.row(i);
      for (int j = 0; j < e_; ++j) {
        T[i][j].topLeftCorner(e_, e_) = d.s3[i] * W(i, j) * outer;
      }
    }
    return T;
  }

  Mat jacobian_theta(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    Mat J = Mat::Zero(dim_, param_dim_);
    for (int b = 0; b < e_; ++b) {
      for (int a = 0; a < e_; ++a) {
        J(a, a + b * e_) = d.s1[a] * xi[b];
      }
    }
    return J;
  }

  Mat hess_contract_out(const Vec& xi, const Vec& theta, const Vec& u) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    Mat G = Mat::Zero(dim_, dim_);
    G.topLeftCorner(e_, e_) =
        W.transpose() * (u.head(e_).cwiseProduct(d.s2)).asDiagonal() * W;
    return G;
  }

  Vec hess_contract_in(const Vec& xi, const Vec& theta, const Vec& u,
                       const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    Vec out = Vec::Zero(dim_);
    out.head(e_) = d.s2.cwiseProduct(W * u.head(e_)).cwiseProduct(W * v.head(e_));
    return out;
  }

  Vec third_contract(const Vec& xi, const Vec& theta, const Vec& w, const Vec& u,
                     const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    const Vec core = w.head(e_).cwiseProduct(d.s3).cwiseProduct(W * u.head(e_))
                         .cwiseProduct(W * v.head(e_));
    Vec out = Vec::Zero(dim_);
    out.head(e_) = W.transpose() * core;
    return out;
  }

  Vec dtheta_contract(const Vec& xi, const Vec& theta, const Vec& u) const override {
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    const Vec us1 = u.head(e_).cwiseProduct(d.s1);
    Vec g(param_dim_);
    Eigen::Map<Mat>(g.data(), e_, e_) = us1 * xi.head(e_).transpose();
    return g;
  }

  Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u,
                          const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    const Vec us2Wv = u.head(e_).cwiseProduct(d.s2).cwiseProduct(W * v.head(e_));
    Vec g(param_dim_);
    Eigen::Map<Mat>(g.data(), e_, e_) = us2Wv * xi.head(e_).transpose() +
                                        u.head(e_).cwiseProduct(d.s1) *
                                            v.head(e_).transpose();
    return g;
  }

  Vec dtheta_dxi2_contract(const Vec& xi, const Vec& theta, const Vec& w,
                           const Vec& u, const Vec& v) const override {
    const Mat W = weights(theta);
    const ActDerivs d = act_derivs(Activation::tanh_act, pre(xi, theta));
    const Vec Wu = W * u.head(e_);
    const Vec Wv = W * v.head(e_);
    const Vec ws3 = w.head(e_).cwiseProduct(d.s3).cwiseProduct(Wu).cwiseProduct(Wv);
    const Vec ws2 = w.head(e_).cwiseProduct(d.s2);
    Vec g(param_dim_);
    Eigen::Map<Mat>(g.data(), e_, e_) = ws3 * xi.head(e_).transpose() +
                                        ws2.cwiseProduct(Wv) * u.head(e_).transpose() +
                                        ws2.cwiseProduct(Wu) * v.head(e_).transpose();
    return g;
  }

 private:
  Vec pre(const Vec& xi, const Vec& theta) const { return weights(theta) * xi.head(e_); }
  Mat weights(const Vec& theta) const {
    return Eigen::Map<const Mat>(theta.data(), e_, e_);
  }
  int e_;
};

// f identically 0. Carries d inert parameters so that frozen-layer behavior
// (D_theta f = 0) is exercisable.
class ZeroDynamics final : public Dynamics {
 public:
  explicit ZeroDynamics(int dim) : Dynamics(dim, dim) {}
  DynamicsFamily family() const override { return DynamicsFamily::zero; }
  Vec eval(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return Vec::Zero(dim_);
  }
  Mat jacobian_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return Mat::Zero(dim_, dim_);
  }
  Tensor3 hessian_xi(const Vec&, const Vec&) const override {
    return Tensor3(dim_, Mat::Zero(dim_, dim_));
  }
  Tensor4 third_xi(const Vec&, const Vec&) const override {
    return Tensor4(dim_, Tensor3(dim_, Mat::Zero(dim_, dim_)));
  }
  Mat jacobian_theta(const Vec&, const Vec&) const override {
    return Mat::Zero(dim_, param_dim_);
  }
  Mat hess_contract_out(const Vec&, const Vec&, const Vec&) const override {
    return Mat::Zero(dim_, dim_);
  }
  Vec hess_contract_in(const Vec&, const Vec&, const Vec&, const Vec&) const override {
    return Vec::Zero(dim_);
  }
  Vec third_contract(const Vec&, const Vec&, const Vec&, const Vec&,
                     const Vec&) const override {
    return Vec::Zero(dim_);
  }
  Vec dtheta_contract(const Vec&, const Vec&, const Vec&) const override {
    return Vec::Zero(param_dim_);
  }
  Vec dtheta_dxi_contract(const Vec&, const Vec&, const Vec&, const Vec&) const override {
    return Vec::Zero(param_dim_);
  }
  Vec dtheta_dxi2_contract(const Vec&, const Vec&, const Vec&, const Vec&,
                           const Vec&) const override {
    return Vec::Zero(param_dim_);
  }
};

// ell(xi, theta) = (theta . xi_{1:d-1} - xi_d)^2. The residual is affine in
// xi with gradient direction a = (theta, -1), so the xi-Hessian is 2 a a^T
// and third xi-derivatives vanish.
class SquaredRegression final : public TerminalLoss {
 public:
  explicit SquaredRegression(int dim) : TerminalLoss(dim, dim - 1), e_(dim - 1) {}
  TerminalFamily family() const override { return TerminalFamily::squared_regression; }

  double eval(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const double r = residual(xi, theta);
    return r * r;
  }
  Vec grad_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return 2.0 * residual(xi, theta) * direction(theta);
  }
  Mat hess_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Vec a = direction(theta);
    return 2.0 * a * a.transpose();
  }
  Tensor3 third_xi(const Vec&, const Vec&) const override {
    return Tensor3(dim_, Mat::Zero(dim_, dim_));
  }
  Vec grad_theta(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return 2.0 * residual(xi, theta) * xi.head(e_);
  }
  Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u) const override {
    const Vec a = direction(theta);
    return 2.0 * (a.dot(u) * xi.head(e_) + residual(xi, theta) * u.head(e_));
  }
  Vec dtheta_dxi2_contract(const Vec&, const Vec& theta, const Vec& u,
                           const Vec& v) const override {
    const Vec a = direction(theta);
    return 2.0 * (a.dot(v) * u.head(e_) + a.dot(u) * v.head(e_));
  }
  Vec third_contract(const Vec&, const Vec&, const Vec&, const Vec&) const override {
    return Vec::Zero(dim_);
  }

 private:
  double residual(const Vec& xi, const Vec& theta) const {
    return theta.dot(xi.head(e_)) - xi[e_];
  }
  Vec direction(const Vec& theta) const {
    Vec a(dim_);
    a.head(e_) = theta;
    a[e_] = -1.0;
    return a;
  }
  int e_;
};

// ell(xi, theta) = 0.5 * ||xi - theta||^2 with the target as parameter.
class QuadraticToTarget final : public TerminalLoss {
 public:
  explicit QuadraticToTarget(int dim) : TerminalLoss(dim, dim) {}
  TerminalFamily family() const override { return TerminalFamily::quadratic_to_target; }

  double eval(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return 0.5 * (xi - theta).squaredNorm();
  }
  Vec grad_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return xi - theta;
  }
  Mat hess_xi(const Vec&, const Vec&) const override { return Mat::Identity(dim_, dim_); }
  Tensor3 third_xi(const Vec&, const Vec&) const override {
    return Tensor3(dim_, Mat::Zero(dim_, dim_));
  }
  Vec grad_theta(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return theta - xi;
  }
  Vec dtheta_dxi_contract(const Vec&, const Vec&, const Vec& u) const override {
    return -u;
  }
  Vec dtheta_dxi2_contract(const Vec&, const Vec&, const Vec&, const Vec&) const override {
    return Vec::Zero(param_dim_);
  }
  Vec third_contract(const Vec&, const Vec&, const Vec&, const Vec&) const override {
    return Vec::Zero(dim_);
  }
};

// ell(xi, theta) = log(1 + exp(-m)),  m = xi_d * (theta . xi_{1:d-1}).
// Smooth margin loss; the label coordinate is treated as a real value.
class LogisticMargin final : public TerminalLoss {
 public:
  explicit LogisticMargin(int dim) : TerminalLoss(dim, dim - 1), e_(dim - 1) {}
  TerminalFamily family() const override { return TerminalFamily::logistic_margin; }

  double eval(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const double m = margin(xi, theta);
    // softplus(-m), stable for both signs
    return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  Vec grad_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const double g1 = dm1(xi, theta);
    return g1 * grad_m(xi, theta);
  }
  Mat hess_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Vec gm = grad_m(xi, theta);
    return dm2(xi, theta) * gm * gm.transpose() + dm1(xi, theta) * hess_m(theta);
  }
  Tensor3 third_xi(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    const Vec gm = grad_m(xi, theta);
    const Mat hm = hess_m(theta);
    const double g2 = dm2(xi, theta);
    const double g3 = dm3(xi, theta);
    Tensor3 T(dim_, Mat::Zero(dim_, dim_));
    for (int i = 0; i < dim_; ++i) {
      T[i] = g3 * gm[i] * gm * gm.transpose() +
             g2 * (hm.row(i).transpose() * gm.transpose() + gm * hm.row(i) +
                   gm[i] * hm);
    }
    return T;
  }
  Vec grad_theta(const Vec& xi, const Vec& theta) const override {
    check_state(xi);
    check_params(theta);
    return dm1(xi, theta) * xi[e_] * xi.head(e_);
  }
  Vec dtheta_dxi_contract(const Vec& xi, const Vec& theta, const Vec& u) const override {
    const double y = xi[e_];
    const Vec v = xi.head(e_);
    const Vec gm = grad_m(xi, theta);
    // d/dxi_j of dm1 * y * v_a, contracted with u
    return dm2(xi, theta) * gm.dot(u) * y * v +
           dm1(xi, theta) * (y * u.head(e_) + u[e_] * v);
  }
  Vec dtheta_dxi2_contract(const Vec& xi, const Vec& theta, const Vec& u,
                           const Vec& v) const override {
    const double y = xi[e_];
    const Vec vv = xi.head(e_);
    const Vec gm = grad_m(xi, theta);
    const double mu = gm.dot(u);
    const double mv = gm.dot(v);
    const double g1 = dm1(xi, theta);
    const double g2 = dm2(xi, theta);
    const double g3 = dm3(xi, theta);
    const Vec du = y * u.head(e_) + u[e_] * vv;  // d(grad_m . u)/dtheta
    const Vec dv = y * v.head(e_) + v[e_] * vv;
    const double uhv = theta.dot(u.head(e_)) * v[e_] + u[e_] * theta.dot(v.head(e_));
    return g3 * y * vv * mu * mv + g2 * (du * mv + mu * dv) + g2 * y * vv * uhv +
           g1 * (u.head(e_) * v[e_] + u[e_] * v.head(e_));
  }
  Vec third_contract(const Vec& xi, const Vec& theta, const Vec& u,
                     const Vec& v) const override {
    const Vec gm = grad_m(xi, theta);
    const Mat hm = hess_m(theta);
    const double mu = gm.dot(u);
    const double mv = gm.dot(v);
    return dm3(xi, theta) * mu * mv * gm +
           dm2(xi, theta) * (mu * (hm * v) + mv * (hm * u) + u.dot(hm * v) * gm);
  }

 private:
  double margin(const Vec& xi, const Vec& theta) const {
    return xi[e_] * theta.dot(xi.head(e_));
  }
  Vec grad_m(const Vec& xi, const Vec& theta) const {
    Vec g(dim_);
    g.head(e_) = xi[e_] * theta;
    g[e_] = theta.dot(xi.head(e_));
    return g;
  }
  Mat hess_m(const Vec& theta) const {
    Mat H = Mat::Zero(dim_, dim_);
    H.block(0, e_, e_, 1) = theta;
    H.block(e_, 0, 1, e_) = theta.transpose();
    return H;
  }
  double sig(double t) const { return 1.0 / (1.0 + std::exp(-t)); }
  double dm1(const Vec& xi, const Vec& theta) const { return -sig(-margin(xi, theta)); }
  double dm2(const Vec& xi, const Vec& theta) const {
    const double g = sig(-margin(xi, theta));
    return g * (1.0 - g);
  }
  double dm3(const Vec& xi, const Vec& theta) const {
    const double g = sig(-margin(xi, theta));
    return g * (1.0 - g) * (2.0 * g - 1.0);
  }
  int e_;
};

class ZeroRunning final : public RunningCost {
 public:
  explicit ZeroRunning(int dim) : dim_(dim) {}
  RunningFamily family() const override { return RunningFamily::zero; }
  double eval(const Vec&, const Vec&) const override { return 0.0; }
  Vec grad_xi(const Vec&, const Vec&) const override { return Vec::Zero(dim_); }
  Mat hess_xi(const Vec&, const Vec&) const override { return Mat::Zero(dim_, dim_); }
  Vec grad_theta(const Vec&, const Vec& theta) const override {
    return Vec::Zero(theta.size());
  }
  Vec dtheta_dxi_contract(const Vec&, const Vec& theta, const Vec&) const override {
    return Vec::Zero(theta.size());
  }
  bool is_zero() const override { return true; }

 private:
  int dim_;
};

// Phi(xi, theta) = c * ||theta||^2; depends on the layer parameters only.
class RidgeRunning final : public RunningCost {
 public:
  RidgeRunning(int dim, double coeff) : dim_(dim), coeff_(coeff) {}
  RunningFamily family() const override { return RunningFamily::ridge_on_params; }
  double eval(const Vec&, const Vec& theta) const override {
    return coeff_ * theta.squaredNorm();
  }
  Vec grad_xi(const Vec&, const Vec&) const override { return Vec::Zero(dim_); }
  Mat hess_xi(const Vec&, const Vec&) const override { return Mat::Zero(dim_, dim_); }
  Vec grad_theta(const Vec&, const Vec& theta) const override {
    return 2.0 * coeff_ * theta;
  }
  Vec dtheta_dxi_contract(const Vec&, const Vec& theta, const Vec&) const override {
    return Vec::Zero(theta.size());
  }
  bool is_zero() const override { return false; }

 private:
  int dim_;
  double coeff_;
};

}  // namespace

Model make_model(const DynamicsSpec& dspec, const LossSpec& lspec) {
  if (dspec.dim < 1) throw ConfigError("state dimension must be >= 1");
  const bool needs_label =
      dspec.family == DynamicsFamily::regression_frozen_label ||
      lspec.terminal == TerminalFamily::squared_regression ||
      lspec.terminal == TerminalFamily::logistic_margin;
  if (needs_label && dspec.dim < 2) {
    throw ConfigError("regression-style families need state dimension >= 2");
  }

  Model m;
  switch (dspec.family) {
    case DynamicsFamily::tanh_resnet:
      m.dynamics = std::make_shared<SigmaResnet>(dspec.dim, Activation::tanh_act,
                                                 DynamicsFamily::tanh_resnet);
      break;
    case DynamicsFamily::relu_resnet:
      m.dynamics = std::make_shared<SigmaResnet>(dspec.dim, Activation::relu_act,
                                                 DynamicsFamily::relu_resnet);
      break;
    case DynamicsFamily::regression_frozen_label:
      m.dynamics = std::make_shared<FrozenLabelResnet>(dspec.dim);
      break;
    case DynamicsFamily::zero:
      m.dynamics = std::make_shared<ZeroDynamics>(dspec.dim);
      break;
  }
  switch (lspec.terminal) {
    case TerminalFamily::squared_regression:
      m.terminal = std::make_shared<SquaredRegression>(dspec.dim);
      break;
    case TerminalFamily::quadratic_to_target:
      m.terminal = std::make_shared<QuadraticToTarget>(dspec.dim);
      break;
    case TerminalFamily::logistic_margin:
      m.terminal = std::make_shared<LogisticMargin>(dspec.dim);
      break;
  }
  switch (lspec.running) {
    case RunningFamily::zero:
      m.running = std::make_shared<ZeroRunning>(dspec.dim);
      break;
    case RunningFamily::ridge_on_params:
      m.running = std::make_shared<RidgeRunning>(dspec.dim, lspec.ridge_coeff);
      break;
  }
  return m;
}

ControlPath make_zero_control(const Model& model, int num_layers, double h) {
  if (num_layers < 1) throw ConfigError("need at least one layer");
  if (!(h > 0.0)) throw ConfigError("step size h must be positive");
  ControlPath ctrl;
  ctrl.h = h;
  ctrl.layers.assign(static_cast<std::size_t>(num_layers),
                     Vec::Zero(model.dynamics->param_dim()));
  ctrl.terminal = Vec::Zero(model.terminal->param_dim());
  return ctrl;
}

void validate_control(const Model& model, const ControlPath& ctrl) {
  require_shape(!ctrl.layers.empty(), "control path has no layers");
  require_shape(ctrl.h > 0.0, "control path has nonpositive step size");
  for (const Vec& th : ctrl.layers) {
    require_shape(th.size() == model.dynamics->param_dim(),
                  "layer parameter block has wrong dimension");
  }
  require_shape(ctrl.terminal.size() == model.terminal->param_dim(),
                "terminal parameter block has wrong dimension");
}

std::string to_string(DynamicsFamily f) {
  switch (f) {
    case DynamicsFamily::tanh_resnet: return "tanh_resnet";
    case DynamicsFamily::relu_resnet: return "relu_resnet";
    case DynamicsFamily::regression_frozen_label: return "regression_frozen_label";
    case DynamicsFamily::zero: return "zero";
  }
  return "?";
}
std::string to_string(TerminalFamily f) {
  switch (f) {
    case TerminalFamily::squared_regression: return "squared_regression";
    case TerminalFamily::quadratic_to_target: return "quadratic_to_target";
    case TerminalFamily::logistic_margin: return "logistic_margin";
  }
  return "?";
}
std::string to_string(RunningFamily f) {
  switch (f) {
    case RunningFamily::zero: return "zero";
    case RunningFamily::ridge_on_params: return "ridge_on_params";
  }
  return "?";
}

DynamicsFamily dynamics_family_from_string(const std::string& s) {
  if (s == "tanh_resnet") return DynamicsFamily::tanh_resnet;
  if (s == "relu_resnet") return DynamicsFamily::relu_resnet;
  if (s == "regression_frozen_label") return DynamicsFamily::regression_frozen_label;
  if (s == "zero") return DynamicsFamily::zero;
  throw ConfigError("unknown dynamics family: " + s);
}
TerminalFamily terminal_family_from_string(const std::string& s) {
  if (s == "squared_regression") return TerminalFamily::squared_regression;
  if (s == "quadratic_to_target") return TerminalFamily::quadratic_to_target;
  if (s == "logistic_margin") return TerminalFamily::logistic_margin;
  throw ConfigError("unknown terminal loss family: " + s);
}
RunningFamily running_family_from_string(const std::string& s) {
  if (s == "zero") return RunningFamily::zero;
  if (s == "ridge_on_params") return RunningFamily::ridge_on_params;
  throw ConfigError("unknown running cost family: " + s);
}

Mat contract_hess_out(const Tensor3& H, const Vec& u) {
  Mat G = Mat::Zero(H[0].rows(), H[0].cols());
  for (std::size_t i = 0; i < H.size(); ++i) G += u[static_cast<Eigen::Index>(i)] * H[i];
  return G;
}

Vec contract_hess_in(const Tensor3& H, const Vec& u, const Vec& v) {
  Vec out(static_cast<Eigen::Index>(H.size()));
  for (std::size_t i = 0; i < H.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = u.dot(H[i] * v);
  }
  return out;
}

Vec contract_third(const Tensor4& T, const Vec& w, const Vec& u, const Vec& v) {
  const Eigen::Index d = u.size();
  Vec out = Vec::Zero(d);
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi == 0.0) continue;
    for (Eigen::Index j = 0; j < d; ++j) {
      // T[i][j](k, c) contracted with u_j v_k leaves index c free
      out += wi * u[j] * (T[i][static_cast<std::size_t>(j)].transpose() * v);
    }
  }
  return out;
}

}  // namespace wrc
