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

// Test-side oracles, kept independent of the library code paths they check.

#pragma once

#include <functional>

#include "wrc/model.hpp"
#include "wrc/rng.hpp"

namespace testsup {

using wrc::ControlPath;
using wrc::Mat;
using wrc::Vec;

// Central finite differences of a scalar field, test-local implementation.
template <typename F>
Vec fd_gradient(F&& f, const Vec& x, double eps = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    g[i] = (f(xp) - f(xm)) / (2.0 * eps);
  }
  return g;
}

template <typename F>
Mat fd_jacobian(F&& f, const Vec& x, Eigen::Index out_dim, double eps = 1e-6) {
  Mat J(out_dim, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    J.col(i) = (f(xp) - f(xm)) / (2.0 * eps);
  }
  return J;
}

template <typename F>
Mat fd_hessian(F&& f, const Vec& x, double eps = 1e-4) {
  const Eigen::Index d = x.size();
  Mat H(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      Vec a = x, b = x, c = x, e = x;
      a[i] += eps; a[j] += eps;
      b[i] += eps; b[j] -= eps;
      c[i] -= eps; c[j] += eps;
      e[i] -= eps; e[j] -= eps;
      const double v = (f(a) - f(b) - f(c) + f(e)) / (4.0 * eps * eps);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return H;
}

// Gradient of a scalar functional of the control in every parameter block.
struct ThetaGradient {
  std::vector<Vec> layers;
  Vec terminal;
};

template <typename F>
ThetaGradient fd_theta_gradient(F&& f, const ControlPath& base, double eps = 1e-5) {
  ThetaGradient out;
  ControlPath work = base;
  out.layers.resize(base.layers.size());
  for (std::size_t k = 0; k < base.layers.size(); ++k) {
    out.layers[k] = Vec(base.layers[k].size());
    for (Eigen::Index c = 0; c < base.layers[k].size(); ++c) {
      const double keep = work.layers[k][c];
      work.layers[k][c] = keep + eps;
      const double fp = f(work);
      work.layers[k][c] = keep - eps;
      const double fm = f(work);
      work.layers[k][c] = keep;
      out.layers[k][c] = (fp - fm) / (2.0 * eps);
    }
  }
  out.terminal = Vec(base.terminal.size());
  for (Eigen::Index c = 0; c < base.terminal.size(); ++c) {
    const double keep = work.terminal[c];
    work.terminal[c] = keep + eps;
    const double fp = f(work);
    work.terminal[c] = keep - eps;
    const double fm = f(work);
    work.terminal[c] = keep;
    out.terminal[c] = (fp - fm) / (2.0 * eps);
  }
  return out;
}

// Exactly linear dynamics f = A xi + b realized through relu_resnet on a
// region where every preactivation stays strictly positive (entrywise
// nonnegative A, positive b, positive states).
struct LinearInstance {
  wrc::Model model;
  ControlPath ctrl;
  Mat A;
  Vec b;
};

inline LinearInstance make_linear_instance(int d, int N, double h,
                                           std::uint64_t seed) {
  wrc::Rng rng(seed);
  LinearInstance inst;
  wrc::DynamicsSpec dspec;
  dspec.family = wrc::DynamicsFamily::relu_resnet;
  dspec.dim = d;
  wrc::LossSpec lspec;
  lspec.terminal = wrc::TerminalFamily::quadratic_to_target;
  inst.model = wrc::make_model(dspec, lspec);

  inst.A = Mat(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) inst.A(i, j) = 0.3 * rng.uniform();
  }
  inst.b = Vec::Constant(d, 0.5);

  inst.ctrl = wrc::make_zero_control(inst.model, N, h);
  Vec theta(d * d + d);
  Eigen::Map<Mat>(theta.data(), d, d) = inst.A;
  theta.tail(d) = inst.b;
  for (Vec& th : inst.ctrl.layers) th = theta;
  inst.ctrl.terminal = Vec::Constant(d, 2.0);
  return inst;
}

// Largest eigenvalue by power iteration on a shifted matrix.
inline double power_iteration_lmax(const Mat& H, int iters = 500) {
  const Eigen::Index d = H.rows();
  const double shift = H.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  const Mat S = H + shift * Mat::Identity(d, d);
  Vec v = Vec::Ones(d).normalized();
  for (int i = 0; i < iters; ++i) v = (S * v).normalized();
  return v.dot(H * v);
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / (std::abs(b) + 1e-12);
}

inline double rel_diff(const Vec& a, const Vec& b) {
  return (a - b).norm() / (b.norm() + 1e-12);
}

}  // namespace testsup
