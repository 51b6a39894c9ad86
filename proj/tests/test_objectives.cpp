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
#include "wrc/objectives.hpp"
#include "wrc/verify.hpp"

using namespace wrc;
using testsup::rel_diff;

namespace {

Model zero_model(int d) {
  DynamicsSpec dspec{DynamicsFamily::zero, d};
  LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
  return make_model(dspec, lspec);
}

}  // namespace

TEST_CASE("loss_j basics") {
  SUBCASE("zero dynamics evaluates the terminal loss at the input") {
    const Model m = zero_model(2);
    ControlPath ctrl = make_zero_control(m, 4, 0.3);
    ctrl.terminal << 0.5, -1.0;
    Vec x(2);
    x << 1.0, 1.0;
    CHECK(loss_j(m, ctrl, x) == doctest::Approx(0.5 * (x - ctrl.terminal).squaredNorm()));
  }
  SUBCASE("interpolating parameters give zero squared loss") {
    DynamicsSpec dspec{DynamicsFamily::zero, 2};
    LossSpec lspec{TerminalFamily::squared_regression, RunningFamily::zero, 0.0};
    const Model m = make_model(dspec, lspec);
    ControlPath ctrl = make_zero_control(m, 3, 0.1);
    ctrl.terminal << 2.0;  // y = 2 v exactly on the point below
    Vec x(2);
    x << 1.5, 3.0;
    CHECK(loss_j(m, ctrl, x) == 0.0);
  }
  SUBCASE("duplicate-sum oracle on a random instance with running cost") {
    DynamicsSpec dspec{DynamicsFamily::tanh_resnet, 3};
    LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::ridge_on_params,
                   0.07};
    const Model m = make_model(dspec, lspec);
    Rng rng(5);
    ControlPath ctrl = make_zero_control(m, 6, 0.08);
    for (Vec& th : ctrl.layers) th = rng.normal_vec(th.size());
    ctrl.terminal = rng.normal_vec(3);
    const Vec x = rng.normal_vec(3);

    // independent re-implementation: explicit Euler loop, running cost summed
    // in reverse order with extended precision
    std::vector<Vec> states{x};
    for (int k = 0; k < ctrl.num_layers(); ++k) {
      states.push_back(states.back() +
                       ctrl.h * m.dynamics->eval(states.back(),
                                                 ctrl.layers[static_cast<std::size_t>(k)]));
    }
    long double run = 0.0L;
    for (int k = ctrl.num_layers() - 1; k >= 0; --k) {
      run += static_cast<long double>(
          m.running->eval(states[static_cast<std::size_t>(k)],
                          ctrl.layers[static_cast<std::size_t>(k)]));
    }
    const double expect = m.terminal->eval(states.back(), ctrl.terminal) +
                          ctrl.h * static_cast<double>(run);
    CHECK(loss_j(m, ctrl, x) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("risk is the weighted mean of per-sample losses") {
  const Model m = zero_model(2);
  ControlPath ctrl = make_zero_control(m, 2, 0.5);
  Vec a(2), b(2), c(2);
  a << 1.0, 0.0;
  b << 0.0, 2.0;
  c << -1.0, 1.0;

  SUBCASE("single point") {
    const auto mu = EmpiricalMeasure::uniform({a});
    CHECK(risk(m, ctrl, mu) == doctest::Approx(loss_j(m, ctrl, a)));
  }
  SUBCASE("duplicated point with split weights equals the single point") {
    const auto one = EmpiricalMeasure::uniform({a});
    const auto split = EmpiricalMeasure::weighted({a, a}, {0.3, 0.7});
    CHECK(risk(m, ctrl, split) == doctest::Approx(risk(m, ctrl, one)));
  }
  SUBCASE("uniform three-point set averages") {
    const auto mu = EmpiricalMeasure::uniform({a, b, c});
    const double expect =
        (loss_j(m, ctrl, a) + loss_j(m, ctrl, b) + loss_j(m, ctrl, c)) / 3.0;
    CHECK(risk(m, ctrl, mu) == doctest::Approx(expect));
  }
  SUBCASE("empty measure is refused") {
    CHECK_THROWS_AS(EmpiricalMeasure::uniform({}), ConfigError);
  }
}

TEST_CASE("first-order objective") {
  SUBCASE("delta = 0 collapses to the risk exactly") {
    const auto insts = make_random_instances(2, 3, 4, 0.05, 41);
    for (const auto& inst : insts) {
      for (double p : {2.0, kInf}) {
        const NormSpec ns = make_norm_spec(p, GroundNorm::euclidean);
        CHECK(first_order_objective(inst.model, inst.ctrl, inst.mu, 0.0, ns) ==
              risk(inst.model, inst.ctrl, inst.mu));
      }
    }
  }
  SUBCASE("zero dynamics closed form") {
    // quadratic-to-target with zero dynamics: grad j = x - target
    const Model m = zero_model(2);
    ControlPath ctrl = make_zero_control(m, 2, 0.1);
    Vec a(2), b(2);
    a << 3.0, 4.0;  // |grad| = 5
    b << 0.0, 1.0;  // |grad| = 1
    const auto mu = EmpiricalMeasure::uniform({a, b});
    const double J = risk(m, ctrl, mu);
    const double delta = 0.2;
    for (double p : {2.0, 4.0, kInf}) {
      const NormSpec ns = make_norm_spec(p, GroundNorm::euclidean);
      const double reg =
          delta * std::pow(0.5 * std::pow(5.0, ns.q) + 0.5 * std::pow(1.0, ns.q),
                           1.0 / ns.q);
      CHECK(first_order_objective(m, ctrl, mu, delta, ns) == doctest::Approx(J + reg));
    }
  }
  SUBCASE("nondecreasing in delta") {
    const auto insts = make_random_instances(2, 3, 4, 0.05, 43);
    for (const auto& inst : insts) {
      for (double p : {2.0, 3.0, kInf}) {
        for (GroundNorm g : {GroundNorm::euclidean, GroundNorm::max_abs}) {
          const NormSpec ns = make_norm_spec(p, g);
          double prev = -kInf;
          for (double delta : {0.0, 0.01, 0.1, 0.5, 1.0}) {
            const double v =
                first_order_objective(inst.model, inst.ctrl, inst.mu, delta, ns);
            CHECK(v >= prev - 1e-12);
            prev = v;
          }
        }
      }
    }
  }
}

TEST_CASE("second-order v1 objective") {
  SUBCASE("delta = 0 collapses to the risk") {
    const auto insts = make_random_instances(1, 3, 4, 0.05, 47);
    const auto& inst = insts.front();
    const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
    CHECK(second_order_v1_objective(inst.model, inst.ctrl, inst.mu, 0.0, ns) ==
          risk(inst.model, inst.ctrl, inst.mu));
  }
  SUBCASE("zero dynamics: adjoint form equals the dense Hessian formula") {
    // grad j = x - c and D2 j = I, so the quadratic term has a closed form
    const Model m = zero_model(3);
    ControlPath ctrl = make_zero_control(m, 3, 0.1);
    ctrl.terminal << 0.1, -0.2, 0.3;
    Rng rng(49);
    std::vector<Vec> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(rng.normal_vec(3));
    const auto mu = EmpiricalMeasure::uniform(pts);
    for (double p : {2.0, 3.0, kInf}) {
      const NormSpec ns = make_norm_spec(p, GroundNorm::euclidean);
      const double delta = 0.3;
      // with D2 j = I the quadratic term is
      // (delta^2/2) (E|g|^q)^{-2/p} E[ g^T g / |g|^{2(1-1/(p-1))} ]
      //   = (delta^2/2) (E|g|^q)^{-2/p} E[ |g|^{2q-2} ]
      double mean_q = 0.0, quad = 0.0;
      for (const Vec& x : pts) {
        const Vec g = x - ctrl.terminal;
        mean_q += 0.25 * std::pow(g.norm(), ns.q);
        quad += 0.25 * std::pow(g.norm(), 2.0 * ns.q - 2.0);
      }
      const double prefac = ns.p_finite() ? std::pow(mean_q, -2.0 / ns.p) : 1.0;
      const double expect = risk(m, ctrl, mu) + delta * std::pow(mean_q, 1.0 / ns.q) +
                            0.5 * delta * delta * prefac * quad;
      CHECK(second_order_v1_objective(m, ctrl, mu, delta, ns) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("random net: equals the expansion built from FD Hessians") {
    const auto insts = make_random_instances(2, 3, 5, 0.04, 53);
    for (const auto& inst : insts) {
      for (double p : {2.0, 3.0, 4.0, kInf}) {
        const NormSpec ns = make_norm_spec(p, GroundNorm::euclidean);
        const double delta = 0.2;
        double mean_q = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < inst.mu.size(); ++i) {
          const Vec& x = inst.mu.points[i];
          const Vec g = testsup::fd_gradient(
              [&](const Vec& xx) { return loss_j(inst.model, inst.ctrl, xx); }, x);
          const Mat H = testsup::fd_hessian(
              [&](const Vec& xx) { return loss_j(inst.model, inst.ctrl, xx); }, x);
          mean_q += inst.mu.weights[i] * std::pow(g.norm(), ns.q);
          const double expo = ns.p_finite() ? 2.0 * (1.0 - 1.0 / (ns.p - 1.0)) : 2.0;
          quad += inst.mu.weights[i] * g.dot(H * g) / std::pow(g.norm(), expo);
        }
        const double prefac = ns.p_finite() ? std::pow(mean_q, -2.0 / ns.p) : 1.0;
        const double expect = risk(inst.model, inst.ctrl, inst.mu) +
                              delta * std::pow(mean_q, 1.0 / ns.q) +
                              0.5 * delta * delta * prefac * quad;
        const double got =
            second_order_v1_objective(inst.model, inst.ctrl, inst.mu, delta, ns);
        CHECK(rel_diff(got, expect) < 1e-3);
      }
    }
  }
  SUBCASE("max_abs ground norm is refused") {
    const auto insts = make_random_instances(1, 2, 3, 0.05, 59);
    const NormSpec ns = make_norm_spec(kInf, GroundNorm::max_abs);
    CHECK_THROWS_AS(
        second_order_v1_objective(insts[0].model, insts[0].ctrl, insts[0].mu, 0.1, ns),
        CapabilityError);
  }
}

TEST_CASE("curvature objectives") {
  SUBCASE("zero dynamics closed forms") {
    const Model m = zero_model(3);
    ControlPath ctrl = make_zero_control(m, 2, 0.1);
    Rng rng(61);
    std::vector<Vec> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(rng.normal_vec(3));
    const auto mu = EmpiricalMeasure::uniform(pts);
    const double delta = 0.4;
    // quadratic_to_target: D2 j = I, lambda_max = 1 at every sample
    for (double p : {2.0, 4.0, kInf}) {
      const NormSpec ns = make_norm_spec(p, GroundNorm::euclidean);
      CHECK(curvature_exact_objective(m, ctrl, mu, delta, ns) ==
            doctest::Approx(risk(m, ctrl, mu) + 0.5 * delta * delta));
    }
    // squared_regression: D2 j = 2 a a^T with a = (theta, -1)
    DynamicsSpec dspec{DynamicsFamily::zero, 3};
    LossSpec lspec{TerminalFamily::squared_regression, RunningFamily::zero, 0.0};
    const Model mr = make_model(dspec, lspec);
    ControlPath cr = make_zero_control(mr, 2, 0.1);
    cr.terminal << 0.5, -1.5;
    const double lmax = 2.0 * (1.0 + 0.25 + 2.25);  // 2 |a|^2
    const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
    CHECK(curvature_exact_objective(mr, cr, mu, delta, ns) ==
          doctest::Approx(risk(mr, cr, mu) + 0.5 * delta * delta * lmax));
  }
  SUBCASE("assembled lambda_max matches the power-iteration oracle") {
    const auto insts = make_random_instances(2, 3, 5, 0.04, 67);
    for (const auto& inst : insts) {
      const Vec& x = inst.mu.points[0];
      const Trajectory traj = forward_state(inst.model, inst.ctrl, x);
      const auto P = backward_costate(inst.model, inst.ctrl, traj);
      Mat H(3, 3);
      for (int c = 0; c < 3; ++c) {
        const auto [gamma, rho] =
            direction_pair(inst.model, inst.ctrl, traj, P, Vec::Unit(3, c));
        H.col(c) = rho[0];
      }
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> eig(H, Eigen::EigenvaluesOnly);
      CHECK(rel_diff(eig.eigenvalues().maxCoeff(),
                     testsup::power_iteration_lmax(H)) < 1e-6);
    }
  }
  SUBCASE("dimension cap raises a capability error") {
    const auto insts = make_random_instances(1, 3, 3, 0.05, 71);
    const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
    CHECK_THROWS_AS(curvature_exact_objective(insts[0].model, insts[0].ctrl,
                                              insts[0].mu, 0.1, ns, /*dim_cap=*/2),
                    CapabilityError);
  }
  SUBCASE("monte carlo estimator: reproducible, collapses at delta = 0") {
    const auto insts = make_random_instances(1, 2, 4, 0.05, 73);
    const auto& inst = insts.front();
    const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
    const double v1 =
        curvature_mc_objective(inst.model, inst.ctrl, inst.mu, 0.15, ns, 64, 99);
    const double v2 =
        curvature_mc_objective(inst.model, inst.ctrl, inst.mu, 0.15, ns, 64, 99);
    CHECK(v1 == v2);
    CHECK(curvature_mc_objective(inst.model, inst.ctrl, inst.mu, 0.0, ns, 16, 7) ==
          risk(inst.model, inst.ctrl, inst.mu));
  }
  SUBCASE("negative curvature contributes nothing") {
    // 1-d tanh flow with a far-below target bends j concave at the sample:
    // j'' = (X')^2 + (X - c) X'' with X'' < 0 and X - c large positive.
    DynamicsSpec dspec{DynamicsFamily::tanh_resnet, 1};
    LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
    const Model m = make_model(dspec, lspec);
    ControlPath ctrl = make_zero_control(m, 4, 0.25);
    for (Vec& th : ctrl.layers) th << 1.0, 0.0;  // f = tanh(x)
    ctrl.terminal << -30.0;
    Vec x(1);
    x << 1.0;
    const auto mu = EmpiricalMeasure::uniform({x});
    const Mat H = testsup::fd_hessian(
        [&](const Vec& xx) { return loss_j(m, ctrl, xx); }, x, 1e-4);
    REQUIRE(H(0, 0) < 0.0);  // premise: concave at the sample
    const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
    const double J = risk(m, ctrl, mu);
    CHECK(curvature_exact_objective(m, ctrl, mu, 0.3, ns) == doctest::Approx(J));
    CHECK(curvature_mc_objective(m, ctrl, mu, 0.3, ns, 32, 5) == doctest::Approx(J));
  }
}

TEST_CASE("fgsm helper and objective") {
  const auto insts = make_random_instances(1, 3, 4, 0.05, 79);
  const auto& inst = insts.front();
  SUBCASE("perturbation moves along sign(grad j)") {
    const Vec& x = inst.mu.points[0];
    const Trajectory traj = forward_state(inst.model, inst.ctrl, x);
    const auto P = backward_costate(inst.model, inst.ctrl, traj);
    const Vec xt = fgsm_point(inst.model, inst.ctrl, x, 0.05);
    const Vec step = xt - x;
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      if (P[0][c] != 0.0) {
        CHECK(step[c] == doctest::Approx(-0.05 * (P[0][c] > 0 ? 1.0 : -1.0)));
      }
    }
  }
  SUBCASE("delta = 0 collapses to the risk") {
    CHECK(fgsm_objective(inst.model, inst.ctrl, inst.mu, 0.0, 0.3) ==
          doctest::Approx(risk(inst.model, inst.ctrl, inst.mu)));
  }
  SUBCASE("single-step ascent does not decrease the loss for small delta") {
    for (std::size_t i = 0; i < inst.mu.size(); ++i) {
      const Vec& x = inst.mu.points[i];
      const double j0 = loss_j(inst.model, inst.ctrl, x);
      const Vec xt = fgsm_point(inst.model, inst.ctrl, x, 1e-3);
      CHECK(loss_j(inst.model, inst.ctrl, xt) >= j0 - 1e-9);
    }
  }
}

TEST_CASE("objective breakdown: objective = clean risk + reg term") {
  const auto insts = make_random_instances(1, 2, 4, 0.05, 83);
  const auto& inst = insts.front();
  const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
  for (RegularizerVariant v :
       {RegularizerVariant::clean, RegularizerVariant::first_order,
        RegularizerVariant::second_order_v1, RegularizerVariant::curvature_exact,
        RegularizerVariant::curvature_mc, RegularizerVariant::fgsm}) {
    RegularizerSpec reg;
    reg.variant = v;
    reg.delta = 0.2;
    reg.m = 16;
    reg.seed = 3;
    reg.alpha_mix = 0.4;
    const ObjectiveBreakdown ob =
        objective_value(inst.model, inst.ctrl, inst.mu, reg, ns);
    CHECK(ob.objective == doctest::Approx(ob.clean_risk + ob.reg_term));
    reg.delta = 0.0;
    const ObjectiveBreakdown ob0 =
        objective_value(inst.model, inst.ctrl, inst.mu, reg, ns);
    CHECK(ob0.objective == doctest::Approx(ob0.clean_risk));
  }
}

TEST_CASE("control gradients match finite differences in every block") {
  const auto insts = make_random_instances(1, 3, 4, 1e-2, 89);
  const auto& inst = insts.front();
  const NormSpec p2 = make_norm_spec(2.0, GroundNorm::euclidean);
  const NormSpec pinf = make_norm_spec(kInf, GroundNorm::euclidean);

  SUBCASE("clean gradient equals FD of the risk") {
    GradientRequest req;
    req.variant = RegularizerVariant::clean;
    req.ns = p2;
    const ControlGradient g = control_gradient(inst.model, inst.ctrl, inst.mu, req);
    const auto fd = testsup::fd_theta_gradient(
        [&](const ControlPath& c) { return risk(inst.model, c, inst.mu); }, inst.ctrl);
    for (std::size_t k = 0; k < g.layers.size(); ++k) {
      CHECK(rel_diff(g.layers[k], fd.layers[k]) < 1e-4);
    }
    CHECK(rel_diff(g.terminal, fd.terminal) < 1e-4);
  }

  SUBCASE("first-order gradient, finite and infinite p") {
    for (const NormSpec& ns : {p2, pinf}) {
      GradientRequest req;
      req.variant = RegularizerVariant::first_order;
      req.delta = 0.15;
      req.ns = ns;
      const ControlGradient g = control_gradient(inst.model, inst.ctrl, inst.mu, req);
      const auto fd = testsup::fd_theta_gradient(
          [&](const ControlPath& c) {
            return first_order_objective(inst.model, c, inst.mu, 0.15, ns);
          },
          inst.ctrl);
      for (std::size_t k = 0; k < g.layers.size(); ++k) {
        CHECK(rel_diff(g.layers[k], fd.layers[k]) < 1e-3);
      }
      CHECK(rel_diff(g.terminal, fd.terminal) < 1e-3);
    }
  }

  SUBCASE("second-order gradient at p = inf") {
    GradientRequest req;
    req.variant = RegularizerVariant::second_order_v1;
    req.delta = 0.15;
    req.ns = pinf;
    const ControlGradient g = control_gradient(inst.model, inst.ctrl, inst.mu, req);
    const auto fd = testsup::fd_theta_gradient(
        [&](const ControlPath& c) {
          return second_order_v1_objective(inst.model, c, inst.mu, 0.15, pinf);
        },
        inst.ctrl);
    for (std::size_t k = 0; k < g.layers.size(); ++k) {
      CHECK(rel_diff(g.layers[k], fd.layers[k]) < 1e-3);
    }
    CHECK(rel_diff(g.terminal, fd.terminal) < 1e-3);
  }

  SUBCASE("fgsm gradient against the frozen-perturbation objective") {
    GradientRequest req;
    req.variant = RegularizerVariant::fgsm;
    req.delta = 0.1;
    req.ns = pinf;
    req.alpha_mix = 0.5;
    const ControlGradient g = control_gradient(inst.model, inst.ctrl, inst.mu, req);
    std::vector<Vec> pert(inst.mu.size());
    for (std::size_t i = 0; i < inst.mu.size(); ++i) {
      pert[i] = fgsm_point(inst.model, inst.ctrl, inst.mu.points[i], 0.1);
    }
    const auto frozen = EmpiricalMeasure::weighted(pert, inst.mu.weights);
    const auto fd = testsup::fd_theta_gradient(
        [&](const ControlPath& c) {
          return 0.5 * risk(inst.model, c, inst.mu) +
                 0.5 * risk(inst.model, c, frozen);
        },
        inst.ctrl);
    for (std::size_t k = 0; k < g.layers.size(); ++k) {
      CHECK(rel_diff(g.layers[k], fd.layers[k]) < 1e-3);
    }
    CHECK(rel_diff(g.terminal, fd.terminal) < 1e-3);
  }

  SUBCASE("per-sample Hamiltonian gradient with frozen dynamics is zero") {
    const Model mz = zero_model(3);
    ControlPath cz = make_zero_control(mz, 3, 0.1);
    cz.terminal << 0.2, 0.2, 0.2;
    Vec x(3);
    x << 1.0, 0.0, -1.0;
    const Trajectory traj = forward_state(mz, cz, x);
    AdjointBundle1 b1;
    b1.P = backward_costate(mz, cz, traj);
    const BatchStats st = make_batch_stats({b1.P[0]}, {1.0}, 0.1, pinf);
    b1.beta = forward_beta(mz, cz, traj, b1.P[0], st, 0.1, pinf);
    std::tie(b1.alpha, b1.alpha_hat) = backward_alpha(mz, cz, traj, b1.P, b1.beta);
    for (int k = 0; k < cz.num_layers(); ++k) {
      CHECK(hamiltonian_control_gradient(mz, cz, k, traj, b1).norm() == 0.0);
    }
  }
}

TEST_CASE("terminal parameter gradient") {
  SUBCASE("delta = 0 reduces to the mean of grad_theta ell") {
    const auto insts = make_random_instances(1, 3, 4, 0.05, 97);
    const auto& inst = insts.front();
    const NormSpec ns = make_norm_spec(2.0, GroundNorm::euclidean);
    const Vec g = terminal_parameter_gradient(inst.model, inst.ctrl, inst.mu, 0.0, ns);
    Vec expect = Vec::Zero(g.size());
    for (std::size_t i = 0; i < inst.mu.size(); ++i) {
      const Trajectory traj = forward_state(inst.model, inst.ctrl, inst.mu.points[i]);
      expect += inst.mu.weights[i] * inst.model.terminal->grad_theta(
                                         traj.states.back(), inst.ctrl.terminal);
    }
    CHECK((g - expect).norm() < 1e-14);
  }
  SUBCASE("hand formula for squared regression, one sample, zero dynamics") {
    DynamicsSpec dspec{DynamicsFamily::zero, 2};
    LossSpec lspec{TerminalFamily::squared_regression, RunningFamily::zero, 0.0};
    const Model m = make_model(dspec, lspec);
    ControlPath ctrl = make_zero_control(m, 2, 0.1);
    ctrl.terminal << 0.8;
    Vec x(2);
    x << 1.5, 1.0;  // v = 1.5, y = 1
    const auto mu = EmpiricalMeasure::uniform({x});
    const NormSpec ns = make_norm_spec(2.0, GroundNorm::euclidean);
    const double delta = 0.3;

    const double r = 0.8 * 1.5 - 1.0;
    Vec a(2);
    a << 0.8, -1.0;
    const Vec P0 = -2.0 * r * a;
    const double mean_q = P0.squaredNorm();
    const Vec betaN = delta * std::pow(mean_q, -0.5) * P0;  // zero dynamics
    Vec expect(1);
    expect[0] = 2.0 * r * 1.5 - 2.0 * (1.5 * a.dot(betaN) + r * betaN[0]);
    const Vec g = terminal_parameter_gradient(m, ctrl, mu, delta, ns);
    CHECK((g - expect).norm() < 1e-12);
  }
  SUBCASE("matches FD of the first-order objective in theta_N") {
    const auto insts = make_random_instances(1, 3, 4, 1e-2, 101);
    const auto& inst = insts.front();
    for (double p : {2.0, kInf}) {
      const NormSpec ns = make_norm_spec(p, GroundNorm::euclidean);
      const Vec g =
          terminal_parameter_gradient(inst.model, inst.ctrl, inst.mu, 0.2, ns);
      const auto fd = testsup::fd_theta_gradient(
          [&](const ControlPath& c) {
            return first_order_objective(inst.model, c, inst.mu, 0.2, ns);
          },
          inst.ctrl);
      CHECK(rel_diff(g, fd.terminal) < 1e-3);
    }
  }
}
