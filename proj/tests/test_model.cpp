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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "wrc/model.hpp"
#include "wrc/norms.hpp"
#include "wrc/rng.hpp"

using namespace wrc;
using testsup::rel_diff;

namespace {

Model tanh_model(int d) {
  DynamicsSpec dspec{DynamicsFamily::tanh_resnet, d};
  LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
  return make_model(dspec, lspec);
}

}  // namespace

TEST_CASE("conjugate exponents") {
  CHECK(conjugate_exponents(2.0) == std::pair<double, double>{2.0, kInf});
  const auto [q4, qt4] = conjugate_exponents(4.0);
  CHECK(q4 == doctest::Approx(4.0 / 3.0));
  CHECK(qt4 == doctest::Approx(2.0));
  CHECK(conjugate_exponents(kInf) == std::pair<double, double>{1.0, 1.0});
  CHECK_THROWS_AS(conjugate_exponents(1.5), ConfigError);
  // 1/p + 1/q = 1 and 2/p + 1/q~ = 1 across the range
  for (double p : {2.0, 2.5, 3.0, 4.0, 8.0}) {
    const auto [q, qt] = conjugate_exponents(p);
    CHECK(1.0 / p + 1.0 / q == doctest::Approx(1.0));
    CHECK(2.0 / p + 1.0 / qt == doctest::Approx(1.0));
  }
}

TEST_CASE("dual norms and subgradients") {
  const NormSpec e2 = make_norm_spec(2.0, GroundNorm::euclidean);
  const NormSpec einf = make_norm_spec(kInf, GroundNorm::max_abs);
  Vec v(2);
  v << 3.0, 4.0;
  CHECK(dual_norm(v, e2) == doctest::Approx(5.0));
  Vec w(2);
  w << 1.0, -2.0;
  CHECK(dual_norm(w, einf) == doctest::Approx(3.0));
  const Vec sub = dual_norm_subgradient(w, einf);
  CHECK(sub[0] == 1.0);
  CHECK(sub[1] == -1.0);
  const Vec z = Vec::Zero(2);
  CHECK(dual_norm(z, e2) == 0.0);
  CHECK(dual_norm_subgradient(z, e2).norm() == 0.0);
  CHECK(dual_norm_subgradient(z, einf).norm() == 0.0);
}

TEST_CASE("Hoelder certificate |v.w| <= dual(v) * ground(w)") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + static_cast<int>(rng.next_u64() % 5);
    const Vec v = rng.normal_vec(d);
    const Vec w = rng.normal_vec(d);
    for (GroundNorm g : {GroundNorm::euclidean, GroundNorm::max_abs}) {
      const NormSpec ns = make_norm_spec(2.0 + 3.0 * rng.uniform(), g);
      CHECK(std::abs(v.dot(w)) <= dual_norm(v, ns) * ground_norm(w, ns) + 1e-12);
    }
  }
}

TEST_CASE("power mean handles extremes") {
  CHECK(power_mean({1.0, 2.0, 3.0}, {0.25, 0.5, 0.25}, 1.0) == doctest::Approx(2.0));
  CHECK(power_mean({1.0, 5.0, 3.0}, {0.4, 0.3, 0.3}, kInf) == doctest::Approx(5.0));
  CHECK(power_mean({0.0, 0.0}, {0.5, 0.5}, 2.0) == 0.0);
  // support with zero weight does not drive the sup
  CHECK(power_mean({9.0, 1.0}, {0.0, 1.0}, kInf) == doctest::Approx(1.0));
  // huge exponent without overflow
  CHECK(power_mean({2.0, 1.0}, {0.5, 0.5}, 400.0) == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("tanh dynamics point values") {
  const Model m = tanh_model(1);
  Vec theta(2);  // W = [[w]], b
  SUBCASE("sigma(0) = 0") {
    theta << 0.0, 0.0;
    Vec xi(1);
    xi << 5.0;
    CHECK(m.dynamics->eval(xi, theta)[0] == 0.0);
  }
  SUBCASE("scalar tanh evaluation") {
    theta << 1.0, 0.0;
    Vec xi(1);
    xi << 1.0;
    CHECK(m.dynamics->eval(xi, theta)[0] == doctest::Approx(0.7615941559557649));
  }
  SUBCASE("jacobian at identity weights, zero input, is identity") {
    const Model m3 = tanh_model(3);
    Vec th(12);
    th.setZero();
    Eigen::Map<Mat>(th.data(), 3, 3) = Mat::Identity(3, 3);
    const Mat J = m3.dynamics->jacobian_xi(Vec::Zero(3), th);
    CHECK((J - Mat::Identity(3, 3)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("zero dynamics returns zero everywhere") {
  DynamicsSpec dspec{DynamicsFamily::zero, 3};
  LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
  const Model m = make_model(dspec, lspec);
  Rng rng(3);
  const Vec xi = rng.normal_vec(3);
  const Vec th = rng.normal_vec(m.dynamics->param_dim());
  CHECK(m.dynamics->eval(xi, th).norm() == 0.0);
  CHECK(m.dynamics->jacobian_xi(xi, th).norm() == 0.0);
  CHECK(m.dynamics->jacobian_theta(xi, th).norm() == 0.0);
  CHECK(contract_hess_out(m.dynamics->hessian_xi(xi, th), xi).norm() == 0.0);
}

TEST_CASE("dynamics derivative ladder matches finite differences") {
  Rng rng(11);
  for (DynamicsFamily fam :
       {DynamicsFamily::tanh_resnet, DynamicsFamily::regression_frozen_label}) {
    for (int d : {2, 3, 4}) {
      DynamicsSpec dspec{fam, d};
      LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
      const Model m = make_model(dspec, lspec);
      const Vec xi = rng.normal_vec(d);
      const Vec th = 0.8 * rng.normal_vec(m.dynamics->param_dim());

      // D_xi f vs FD of eval
      const Mat J = m.dynamics->jacobian_xi(xi, th);
      const Mat Jfd = testsup::fd_jacobian(
          [&](const Vec& x) { return m.dynamics->eval(x, th); }, xi, d);
      CHECK((J - Jfd).norm() / (Jfd.norm() + 1e-12) < 1e-6);

      // D2_xi f vs FD of jacobian rows
      const Tensor3 H = m.dynamics->hessian_xi(xi, th);
      for (int i = 0; i < d; ++i) {
        const Mat Hi_fd = testsup::fd_hessian(
            [&](const Vec& x) { return m.dynamics->eval(x, th)[i]; }, xi);
        CHECK((H[static_cast<std::size_t>(i)] - Hi_fd).norm() < 2e-5 * (1.0 + Hi_fd.norm()));
      }

      // D3_xi f vs FD of the hessian contraction
      const Vec u = rng.unit_sphere(d);
      const Vec v = rng.unit_sphere(d);
      const Vec w = rng.normal_vec(d);
      const Vec third = m.dynamics->third_contract(xi, th, w, u, v);
      const Vec third_fd = testsup::fd_gradient(
          [&](const Vec& x) {
            return w.dot(contract_hess_in(m.dynamics->hessian_xi(x, th), u, v));
          },
          xi, 1e-5);
      // contract_hess_in(H,u,v)_i = u^T Hess f_i v; dotting with w then
      // differentiating in x gives the same triple contraction
      CHECK(rel_diff(third, third_fd) < 1e-5);

      // D_theta f vs FD in theta
      const Mat Jt = m.dynamics->jacobian_theta(xi, th);
      const Mat Jt_fd = testsup::fd_jacobian(
          [&](const Vec& t) { return m.dynamics->eval(xi, t); }, th, d);
      CHECK((Jt - Jt_fd).norm() / (Jt_fd.norm() + 1e-12) < 1e-6);
    }
  }
}

TEST_CASE("closed-form contractions agree with dense tensor contractions") {
  Rng rng(13);
  for (DynamicsFamily fam : {DynamicsFamily::tanh_resnet, DynamicsFamily::relu_resnet,
                             DynamicsFamily::regression_frozen_label}) {
    const int d = 3;
    DynamicsSpec dspec{fam, d};
    LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
    const Model m = make_model(dspec, lspec);
    const Vec xi = rng.normal_vec(d);
    const Vec th = rng.normal_vec(m.dynamics->param_dim());
    const Vec u = rng.normal_vec(d);
    const Vec v = rng.normal_vec(d);
    const Vec w = rng.normal_vec(d);

    const Tensor3 H = m.dynamics->hessian_xi(xi, th);
    CHECK((m.dynamics->hess_contract_out(xi, th, u) - contract_hess_out(H, u)).norm() <
          1e-12);
    CHECK((m.dynamics->hess_contract_in(xi, th, u, v) - contract_hess_in(H, u, v))
              .norm() < 1e-12);
    const Tensor4 T = m.dynamics->third_xi(xi, th);
    CHECK((m.dynamics->third_contract(xi, th, w, u, v) - contract_third(T, w, u, v))
              .norm() < 1e-12);

    // mixed theta-xi contractions vs FD in theta of the xi-contractions
    const Vec mixed = m.dynamics->dtheta_dxi_contract(xi, th, u, v);
    const Vec mixed_fd = testsup::fd_gradient(
        [&](const Vec& t) { return u.dot(m.dynamics->jacobian_xi(xi, t) * v); }, th);
    CHECK(rel_diff(mixed, mixed_fd) < 1e-6);

    const Vec mixed2 = m.dynamics->dtheta_dxi2_contract(xi, th, w, u, v);
    const Vec mixed2_fd = testsup::fd_gradient(
        [&](const Vec& t) {
          return w.dot(contract_hess_in(m.dynamics->hessian_xi(xi, t), u, v));
        },
        th);
    CHECK((mixed2 - mixed2_fd).norm() < 1e-5 * (1.0 + mixed2_fd.norm()));
  }
}

TEST_CASE("relu relaxed derivatives: D2 and D3 vanish, tie at zero maps to zero") {
  DynamicsSpec dspec{DynamicsFamily::relu_resnet, 2};
  LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
  const Model m = make_model(dspec, lspec);
  Rng rng(5);
  const Vec xi = rng.normal_vec(2);
  const Vec th = rng.normal_vec(6);
  for (const Mat& Hi : m.dynamics->hessian_xi(xi, th)) CHECK(Hi.norm() == 0.0);
  CHECK(m.dynamics->third_contract(xi, th, xi, xi, xi).norm() == 0.0);

  // z = 0 exactly: relaxed derivative is 0 there
  Vec th0 = Vec::Zero(6);
  const Mat J = m.dynamics->jacobian_xi(Vec::Zero(2), th0);
  CHECK(J.norm() == 0.0);
}

TEST_CASE("terminal losses: values and derivative ladder") {
  Rng rng(17);
  SUBCASE("squared regression point values") {
    DynamicsSpec dspec{DynamicsFamily::regression_frozen_label, 2};
    LossSpec lspec{TerminalFamily::squared_regression, RunningFamily::zero, 0.0};
    const Model m = make_model(dspec, lspec);
    Vec theta(1);
    theta << 0.0;
    Vec xi(2);
    xi << 3.0, 0.0;
    CHECK(m.terminal->eval(xi, theta) == 0.0);  // theta = 0, label 0

    theta << 1.0;
    xi << 2.0, 1.0;
    CHECK(m.terminal->eval(xi, theta) == doctest::Approx(1.0));
    const Vec g = m.terminal->grad_xi(xi, theta);
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(-2.0));
  }

  for (TerminalFamily fam : {TerminalFamily::squared_regression,
                             TerminalFamily::quadratic_to_target,
                             TerminalFamily::logistic_margin}) {
    for (int d : {2, 4}) {
      DynamicsSpec dspec{DynamicsFamily::tanh_resnet, d};
      LossSpec lspec{fam, RunningFamily::zero, 0.0};
      const Model m = make_model(dspec, lspec);
      const Vec xi = rng.normal_vec(d);
      const Vec th = rng.normal_vec(m.terminal->param_dim());

      const Vec g = m.terminal->grad_xi(xi, th);
      const Vec gfd = testsup::fd_gradient(
          [&](const Vec& x) { return m.terminal->eval(x, th); }, xi);
      CHECK(rel_diff(g, gfd) < 1e-6);

      const Mat H = m.terminal->hess_xi(xi, th);
      const Mat Hfd = testsup::fd_hessian(
          [&](const Vec& x) { return m.terminal->eval(x, th); }, xi);
      CHECK((H - Hfd).norm() < 2e-5 * (1.0 + Hfd.norm()));

      const Vec u = rng.unit_sphere(d), v = rng.unit_sphere(d);
      const Vec t3 = m.terminal->third_contract(xi, th, u, v);
      const Vec t3_fd = testsup::fd_gradient(
          [&](const Vec& x) { return u.dot(m.terminal->hess_xi(x, th) * v); }, xi);
      CHECK((t3 - t3_fd).norm() < 1e-5 * (1.0 + t3_fd.norm()));

      const Vec gt = m.terminal->grad_theta(xi, th);
      const Vec gt_fd = testsup::fd_gradient(
          [&](const Vec& t) { return m.terminal->eval(xi, t); }, th);
      CHECK(rel_diff(gt, gt_fd) < 1e-6);

      const Vec mx = m.terminal->dtheta_dxi_contract(xi, th, u);
      const Vec mx_fd = testsup::fd_gradient(
          [&](const Vec& t) { return u.dot(m.terminal->grad_xi(xi, t)); }, th);
      CHECK((mx - mx_fd).norm() < 1e-6 * (1.0 + mx_fd.norm()));

      const Vec mxx = m.terminal->dtheta_dxi2_contract(xi, th, u, v);
      const Vec mxx_fd = testsup::fd_gradient(
          [&](const Vec& t) { return u.dot(m.terminal->hess_xi(xi, t) * v); }, th);
      CHECK((mxx - mxx_fd).norm() < 1e-5 * (1.0 + mxx_fd.norm()));
    }
  }
}

TEST_CASE("ridge running cost differentiates in theta only") {
  DynamicsSpec dspec{DynamicsFamily::tanh_resnet, 2};
  LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::ridge_on_params,
                 0.05};
  const Model m = make_model(dspec, lspec);
  Rng rng(19);
  const Vec xi = rng.normal_vec(2);
  const Vec th = rng.normal_vec(m.dynamics->param_dim());
  CHECK(m.running->eval(xi, th) == doctest::Approx(0.05 * th.squaredNorm()));
  CHECK(m.running->grad_xi(xi, th).norm() == 0.0);
  CHECK((m.running->grad_theta(xi, th) - 0.1 * th).norm() < 1e-14);
}

TEST_CASE("shape errors on dimension mismatch") {
  const Model m = tanh_model(3);
  CHECK_THROWS_AS(m.dynamics->eval(Vec::Zero(2), Vec::Zero(12)), ShapeError);
  CHECK_THROWS_AS(m.dynamics->eval(Vec::Zero(3), Vec::Zero(5)), ShapeError);
  CHECK_THROWS_AS(m.terminal->eval(Vec::Zero(4), Vec::Zero(3)), ShapeError);
}

TEST_CASE("frozen-label dynamics never moves the label coordinate") {
  DynamicsSpec dspec{DynamicsFamily::regression_frozen_label, 3};
  LossSpec lspec{TerminalFamily::squared_regression, RunningFamily::zero, 0.0};
  const Model m = make_model(dspec, lspec);
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const Vec xi = rng.normal_vec(3);
    const Vec th = rng.normal_vec(m.dynamics->param_dim());
    CHECK(m.dynamics->eval(xi, th)[2] == 0.0);
  }
}
