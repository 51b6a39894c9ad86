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

#include "wrc/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "wrc/objectives.hpp"
#include "wrc/propagation.hpp"
#include "wrc/rng.hpp"

namespace wrc {

namespace {

double effective_step(const AttackConfig& cfg) {
  if (cfg.step_size > 0.0) return cfg.step_size;
  return cfg.delta > 0.0 ? cfg.delta / 10.0 : 1e-3;
}

void apply_mask(const Vec& anchor, const std::vector<int>& frozen, Vec& x) {
  for (int c : frozen) {
    if (c < 0 || c >= x.size()) throw ConfigError("frozen coordinate out of range");
    x[c] = anchor[c];
  }
}

void zero_mask(const std::vector<int>& frozen, Vec& u) {
  for (int c : frozen) {
    if (c < 0 || c >= u.size()) throw ConfigError("frozen coordinate out of range");
    u[c] = 0.0;
  }
}

// Loss value and input gradient at a point, one forward/backward pair.
struct Eval {
  double value;
  Vec grad;  // grad_x j = -P_0
};

Eval eval_with_grad(const Model& model, const ControlPath& ctrl, const Vec& x) {
  const Trajectory traj = forward_state(model, ctrl, x);
  const auto P = backward_costate(model, ctrl, traj);
  double value = model.terminal->eval(traj.states.back(), ctrl.terminal);
  if (!model.running->is_zero()) {
    double run = 0.0;
    for (int k = 0; k < ctrl.num_layers(); ++k) {
      run += model.running->eval(traj.states[static_cast<std::size_t>(k)],
                                 ctrl.layers[static_cast<std::size_t>(k)]);
    }
    value += ctrl.h * run;
  }
  return {value, -P[0]};
}

// Project u onto the ground-norm ball of radius delta.
void project_ball(const NormSpec& ns, double delta, Vec& u) {
  switch (ns.ground) {
    case GroundNorm::euclidean: {
      const double n = u.norm();
      if (n > delta) u *= (n > 0.0 ? delta / n : 0.0);
      break;
    }
    case GroundNorm::max_abs:
      u = u.cwiseMax(-delta).cwiseMin(delta);
      break;
  }
}

// First-order maximizer displacement (the q-exponent rescaled gradient field;
// coordinatewise sign at p = inf with the max_abs ground norm).
std::vector<Vec> surrogate_displacement(const Model& model, const ControlPath& ctrl,
                                        const EmpiricalMeasure& mu, double delta,
                                        const NormSpec& ns) {
  std::vector<Vec> grads(mu.size());
  std::vector<double> dual(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    grads[i] = eval_with_grad(model, ctrl, mu.points[i]).grad;
    dual[i] = dual_norm(grads[i], ns);
  }
  std::vector<Vec> u(mu.size());
  if (ns.ground == GroundNorm::max_abs) {
    for (std::size_t i = 0; i < mu.size(); ++i) u[i] = delta * sign_vec(grads[i]);
    if (ns.p_finite()) {
      // rescale onto the transport sphere
      double cost = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        cost += mu.weights[i] * std::pow(ground_norm(u[i], ns), ns.p);
      }
      const double c = std::pow(cost, 1.0 / ns.p);
      if (c > 0.0) {
        for (Vec& ui : u) ui *= delta / c;
      }
    }
    return u;
  }
  const double mean_q = power_mean(dual, mu.weights, ns.q);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double n = grads[i].norm();
    if (n == 0.0 || mean_q == 0.0) {
      u[i] = Vec::Zero(grads[i].size());
      continue;
    }
    const double expo = ns.p_finite() ? 1.0 - 1.0 / (ns.p - 1.0) : 1.0;
    const double scale =
        ns.p_finite() ? delta * std::pow(std::pow(mean_q, ns.q), -1.0 / ns.p) : delta;
    u[i] = scale * grads[i] / std::pow(n, expo);
  }
  return u;
}

}  // namespace

AttackResult pga_attack_pointwise(const Model& model, const ControlPath& ctrl,
                                  const EmpiricalMeasure& mu, const AttackConfig& cfg,
                                  const std::vector<Vec>* warm_start) {
  if (cfg.ns.p_finite()) {
    throw CapabilityError("pointwise attack is the p = inf adversary");
  }
  if (cfg.steps < 1 || cfg.restarts < 1) throw ConfigError("steps and restarts must be >= 1");
  const int d = model.dim();
  Rng rng(cfg.seed);
  const double step0 = effective_step(cfg);
  const auto seed_disp = surrogate_displacement(model, ctrl, mu, cfg.delta, cfg.ns);

  AttackResult out;
  out.perturbed.resize(mu.size());
  out.per_restart.assign(static_cast<std::size_t>(cfg.restarts), 0.0);

  std::vector<double> best(mu.size(), -kInf);
  for (int r = 0; r < cfg.restarts; ++r) {
    double restart_value = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const Vec& anchor = mu.points[i];
      Vec u;
      if (r == 0) {
        u = seed_disp[i];
      } else if (r == 1 && warm_start && warm_start->size() == mu.size()) {
        u = (*warm_start)[i];
      } else if (cfg.ns.ground == GroundNorm::euclidean) {
        u = cfg.delta * std::pow(rng.uniform(), 1.0 / d) * rng.unit_sphere(d);
      } else {
        u = Vec(d);
        for (int c = 0; c < d; ++c) u[c] = cfg.delta * rng.uniform(-1.0, 1.0);
      }
      zero_mask(cfg.frozen_coords, u);
      project_ball(cfg.ns, cfg.delta, u);

      double local_best = -kInf;
      Vec local_best_u = u;
      for (int t = 0; t < cfg.steps; ++t) {
        const Eval e = eval_with_grad(model, ctrl, anchor + u);
        if (e.value > local_best) {
          local_best = e.value;
          local_best_u = u;
        }
        // three-phase shrinking step schedule
        const double step = step0 / std::pow(10.0, (3 * t) / cfg.steps);
        Vec dir = cfg.ns.ground == GroundNorm::euclidean
                      ? (e.grad.norm() > 0.0 ? Vec(e.grad / e.grad.norm())
                                             : Vec::Zero(d).eval())
                      : sign_vec(e.grad);
        u += step * dir;
        zero_mask(cfg.frozen_coords, u);
        project_ball(cfg.ns, cfg.delta, u);
      }
      const Eval e = eval_with_grad(model, ctrl, anchor + u);
      if (e.value > local_best) {
        local_best = e.value;
        local_best_u = u;
      }
      restart_value += mu.weights[i] * local_best;
      if (local_best > best[i]) {
        best[i] = local_best;
        out.perturbed[i] = anchor + local_best_u;
      }
    }
    out.per_restart[static_cast<std::size_t>(r)] = restart_value;
  }

  out.value = 0.0;
  out.transport_cost = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out.value += mu.weights[i] * best[i];
    out.transport_cost =
        std::max(out.transport_cost, ground_norm(out.perturbed[i] - mu.points[i], cfg.ns));
  }
  return out;
}

AttackResult pga_attack_wasserstein(const Model& model, const ControlPath& ctrl,
                                    const EmpiricalMeasure& mu, const AttackConfig& cfg,
                                    const std::vector<Vec>* warm_start) {
  if (!cfg.ns.p_finite()) {
    throw CapabilityError("coupled attack needs finite p; use the pointwise attack");
  }
  if (cfg.steps < 1 || cfg.restarts < 1) throw ConfigError("steps and restarts must be >= 1");
  const int d = model.dim();
  const std::size_t n = mu.size();
  Rng rng(cfg.seed);
  const double step0 = effective_step(cfg);

  const auto project_joint = [&](std::vector<Vec>& u) {
    for (Vec& ui : u) zero_mask(cfg.frozen_coords, ui);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cost += mu.weights[i] * std::pow(ground_norm(u[i], cfg.ns), cfg.ns.p);
    }
    cost = std::pow(cost, 1.0 / cfg.ns.p);
    if (cost > cfg.delta && cost > 0.0) {
      const double s = cfg.delta / cost;
      for (Vec& ui : u) ui *= s;
    }
  };

  const auto field_value = [&](const std::vector<Vec>& u) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v += mu.weights[i] * loss_j(model, ctrl, mu.points[i] + u[i]);
    }
    return v;
  };

  const auto seed_disp = surrogate_displacement(model, ctrl, mu, cfg.delta, cfg.ns);

  AttackResult out;
  out.lower_bound_only = true;
  out.per_restart.assign(static_cast<std::size_t>(cfg.restarts), 0.0);
  double best_value = -kInf;
  std::vector<Vec> best_u;

  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<Vec> u(n);
    if (r == 0) {
      u = seed_disp;
    } else if (r == 1 && warm_start && warm_start->size() == n) {
      u = *warm_start;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = rng.uniform() * cfg.delta * rng.unit_sphere(d);
      }
    }
    project_joint(u);

    double local_best = field_value(u);
    std::vector<Vec> local_best_u = u;
    for (int t = 0; t < cfg.steps; ++t) {
      const double step = step0 / std::pow(10.0, (3 * t) / cfg.steps);
      // joint normalized ascent direction
      std::vector<Vec> g(n);
      double gn2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        g[i] = mu.weights[i] * eval_with_grad(model, ctrl, mu.points[i] + u[i]).grad;
        gn2 += g[i].squaredNorm();
      }
      const double gn = std::sqrt(gn2);
      if (gn == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) u[i] += (step / gn) * g[i];
      project_joint(u);
      const double v = field_value(u);
      if (v > local_best) {
        local_best = v;
        local_best_u = u;
      }
    }
    out.per_restart[static_cast<std::size_t>(r)] = local_best;
    if (local_best > best_value) {
      best_value = local_best;
      best_u = local_best_u;
    }
  }

  out.value = best_value;
  out.perturbed.resize(n);
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.perturbed[i] = mu.points[i] + best_u[i];
    cost += mu.weights[i] * std::pow(ground_norm(best_u[i], cfg.ns), cfg.ns.p);
  }
  out.transport_cost = std::pow(cost, 1.0 / cfg.ns.p);
  return out;
}

double dual_value(const Model& model, const ControlPath& ctrl,
                  const EmpiricalMeasure& mu, const AttackConfig& cfg, double gamma,
                  const std::vector<Vec>* warm_starts) {
  if (!cfg.ns.p_finite()) {
    throw CapabilityError("the dual formulation is implemented for finite p");
  }
  if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
  const int d = model.dim();
  const double p = cfg.ns.p;
  Rng rng(cfg.seed + 0x9e3779b97f4a7c15ULL);

  // spread of the data, used to scale inner ascent steps
  double spread = 0.0;
  for (const Vec& x : mu.points) spread = std::max(spread, x.norm());
  const double step0 = std::max(cfg.delta, 0.1 * (1.0 + spread));

  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Vec& anchor = mu.points[i];
    const auto objective = [&](const Vec& xt) {
      return loss_j(model, ctrl, xt) -
             gamma * std::pow(ground_norm(xt - anchor, cfg.ns), p);
    };

    std::vector<Vec> starts;
    starts.push_back(anchor);
    if (warm_starts && warm_starts->size() == mu.size()) {
      starts.push_back((*warm_starts)[i]);
    }
    const int extra = std::max(1, cfg.restarts / 2);
    for (int r = 0; r < extra; ++r) {
      starts.push_back(anchor + step0 * rng.uniform() * rng.unit_sphere(d));
    }

    double best = -kInf;
    for (Vec xt : starts) {
      apply_mask(anchor, cfg.frozen_coords, xt);
      double local = objective(xt);
      for (int t = 0; t < cfg.steps; ++t) {
        const double step = step0 / std::pow(10.0, (4 * t) / cfg.steps);
        const Eval e = eval_with_grad(model, ctrl, xt);
        Vec g = e.grad;
        const Vec u = xt - anchor;
        const double un = ground_norm(u, cfg.ns);
        if (un > 0.0) {
          if (cfg.ns.ground == GroundNorm::euclidean) {
            g -= gamma * p * std::pow(un, p - 2.0) * u;
          } else {
            // subgradient of |u|_inf^p: steepest coordinate only
            Eigen::Index arg;
            u.cwiseAbs().maxCoeff(&arg);
            Vec sub = Vec::Zero(u.size());
            sub[arg] = u[arg] > 0.0 ? 1.0 : -1.0;
            g -= gamma * p * std::pow(un, p - 1.0) * sub;
          }
        }
        const double gn = g.norm();
        if (gn == 0.0) break;
        xt += (step / gn) * g;
        apply_mask(anchor, cfg.frozen_coords, xt);
        const double v = objective(xt);
        if (v > local) local = v;
        if (v > cfg.unbounded_cap) {
          throw NumericError("dual inner supremum appears unbounded");
        }
      }
      best = std::max(best, local);
    }
    total += mu.weights[i] * best;
  }
  return gamma * std::pow(cfg.delta, p) + total;
}

std::pair<double, double> solve_dual(const Model& model, const ControlPath& ctrl,
                                     const EmpiricalMeasure& mu,
                                     const AttackConfig& cfg,
                                     const std::vector<Vec>* warm_starts) {
  // Lipschitz estimate of j over the data hull
  double lip = 0.0;
  for (const Vec& x : mu.points) {
    lip = std::max(lip, eval_with_grad(model, ctrl, x).grad.norm());
  }
  if (lip <= 0.0) lip = 1.0;

  const auto safe_dual = [&](double gamma) {
    try {
      return dual_value(model, ctrl, mu, cfg, gamma, warm_starts);
    } catch (const NumericError&) {
      return kInf;
    }
  };

  // log grid around the Lipschitz scale, then golden section in the best cell
  std::vector<double> gammas;
  for (int j = -8; j <= 10; ++j) gammas.push_back(10.0 * lip * std::pow(2.0, j));
  std::size_t best_idx = 0;
  double best_val = kInf;
  std::vector<double> vals(gammas.size());
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    vals[j] = safe_dual(gammas[j]);
    if (vals[j] < best_val) {
      best_val = vals[j];
      best_idx = j;
    }
  }
  if (!std::isfinite(best_val)) {
    throw NumericError("dual problem appears unbounded for every bracketed gamma");
  }
  const double lo = best_idx > 0 ? gammas[best_idx - 1] : 0.0;
  const double hi =
      best_idx + 1 < gammas.size() ? gammas[best_idx + 1] : gammas.back() * 2.0;

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = safe_dual(c1), f2 = safe_dual(c2);
  for (int it = 0; it < 40; ++it) {
    if (f1 <= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = safe_dual(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = safe_dual(c2);
    }
  }
  const double gamma_star = f1 <= f2 ? c1 : c2;
  const double value = std::min({f1, f2, best_val});
  return {gamma_star, value};
}

double robust_risk_oracle(const Model& model, const ControlPath& ctrl,
                          const EmpiricalMeasure& mu, double delta,
                          const NormSpec& ns, const std::vector<Vec>* warm_start,
                          std::vector<Vec>* out_displacement) {
  AttackConfig cfg;
  cfg.delta = delta;
  cfg.ns = ns;
  cfg.steps = 300;
  cfg.restarts = 8;
  cfg.seed = 0x5eedULL;

  AttackResult res = ns.p_finite()
                         ? pga_attack_wasserstein(model, ctrl, mu, cfg, warm_start)
                         : pga_attack_pointwise(model, ctrl, mu, cfg, warm_start);

  if (ns.p_finite() && delta > 0.0) {
    // weak-duality sandwich, with the attack points as inner-sup warm starts
    AttackConfig dual_cfg = cfg;
    dual_cfg.steps = 120;
    double lip = 0.0;
    for (const Vec& x : mu.points) {
      lip = std::max(lip, eval_with_grad(model, ctrl, x).grad.norm());
    }
    for (double gamma : {2.0 * lip / std::max(delta, 1e-6), 20.0 * lip}) {
      try {
        const double dv = dual_value(model, ctrl, mu, dual_cfg, gamma, &res.perturbed);
        if (res.value > dv + 1e-7 * (1.0 + std::abs(dv))) {
          throw NumericError("weak duality violated: attack value exceeds dual value");
        }
      } catch (const NumericError& e) {
        if (std::string(e.what()).find("unbounded") == std::string::npos) throw;
      }
    }
  }

  if (out_displacement) {
    out_displacement->resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      (*out_displacement)[i] = res.perturbed[i] - mu.points[i];
    }
  }
  return res.value;
}

}  // namespace wrc
