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

#include "wrc/trainer.hpp"

#include <chrono>
#include <cmath>

#include "wrc/rng.hpp"

namespace wrc {

namespace {

void validate_train_config(const Model& model, const EmpiricalMeasure& mu,
                           const TrainConfig& cfg) {
  const int n = static_cast<int>(mu.size());
  if (cfg.batch_size < 1 || cfg.batch_size > n) {
    throw ConfigError("batch_size must lie in [1, dataset size]");
  }
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (cfg.reg.delta < 0.0) throw ConfigError("delta must be nonnegative");

  switch (cfg.reg.variant) {
    case RegularizerVariant::clean:
    case RegularizerVariant::first_order:
    case RegularizerVariant::second_order_v1:
    case RegularizerVariant::fgsm:
      break;
    default:
      throw ConfigError("trainable variants are clean, first_order, "
                        "second_order_v1 and fgsm");
  }
  if (cfg.reg.variant == RegularizerVariant::second_order_v1 && cfg.ns.p_finite()) {
    throw ConfigError("second_order_v1 training runs the p = inf pathway");
  }
  if (cfg.reg.variant == RegularizerVariant::fgsm &&
      (cfg.reg.alpha_mix < 0.0 || cfg.reg.alpha_mix >= 1.0)) {
    throw ConfigError("alpha_mix must lie in [0, 1)");
  }
  // Mean-field beta statistics are noisy on small batches at finite p; the
  // p = inf initialization is per-sample and any batch size is fine.
  if (cfg.reg.variant == RegularizerVariant::first_order && cfg.ns.p_finite() &&
      cfg.reg.delta > 0.0 && cfg.stats_scope == StatsScope::batch) {
    const int needed = std::min(cfg.min_batch_finite_p, n);
    if (cfg.batch_size < needed) {
      throw ConfigError("finite-p first-order training needs batch_size >= " +
                        std::to_string(needed) +
                        " (or stats_scope = dataset) for stable statistics");
    }
  }
  if (model.dynamics->param_dim() == 0 && model.terminal->param_dim() == 0) {
    throw ConfigError("model has no trainable parameters");
  }
}

bool control_finite(const ControlPath& ctrl) {
  for (const Vec& th : ctrl.layers) {
    if (!all_finite(th)) return false;
  }
  return all_finite(ctrl.terminal);
}

BatchStats dataset_stats(const Model& model, const ControlPath& ctrl,
                         const EmpiricalMeasure& mu, double delta,
                         const NormSpec& ns) {
  std::vector<Vec> P0s(mu.size());
  std::vector<double> w = mu.weights;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Trajectory traj = forward_state(model, ctrl, mu.points[i]);
    P0s[i] = backward_costate(model, ctrl, traj)[0];
  }
  return make_batch_stats(P0s, w, delta, ns);
}

}  // namespace

std::string to_string(TrainStatus s) {
  switch (s) {
    case TrainStatus::epoch_budget: return "epoch_budget";
    case TrainStatus::converged: return "converged";
    case TrainStatus::step_budget: return "step_budget";
    case TrainStatus::diverged: return "diverged";
  }
  return "?";
}

TrainReport train(const Model& model, const EmpiricalMeasure& mu,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate_train_config(model, mu, cfg);
  Rng rng(cfg.seed);

  TrainReport report;
  report.control = make_zero_control(model, cfg.layers, cfg.h);
  ControlPath last_good = report.control;

  GradientRequest req;
  req.variant = cfg.reg.variant;
  req.delta = cfg.reg.delta;
  req.ns = cfg.ns;
  req.alpha_mix = cfg.reg.alpha_mix;

  const std::size_t n = mu.size();
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  bool stop = false;

  for (int epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto perm = rng.permutation(n);

    for (std::size_t at = 0; at < n && !stop; at += bs) {
      const std::size_t end = std::min(at + bs, n);
      std::vector<std::size_t> idx(perm.begin() + static_cast<std::ptrdiff_t>(at),
                                   perm.begin() + static_cast<std::ptrdiff_t>(end));
      const EmpiricalMeasure batch = mu.subset(idx);

      if (cfg.stats_scope == StatsScope::dataset && cfg.ns.p_finite() &&
          cfg.reg.variant == RegularizerVariant::first_order) {
        req.stats_override =
            dataset_stats(model, report.control, mu, cfg.reg.delta, cfg.ns);
      }

      ObjectiveDiagnostics diag;
      const ControlGradient grad =
          control_gradient(model, report.control, batch, req, &diag);
      report.degenerate_samples += diag.degenerate_gradient_samples;

      for (int k = 0; k < report.control.num_layers(); ++k) {
        report.control.layers[static_cast<std::size_t>(k)] -=
            cfg.lr * grad.layers[static_cast<std::size_t>(k)];
      }
      report.control.terminal -= cfg.lr * grad.terminal;
      ++report.steps_taken;

      if (!control_finite(report.control)) {
        report.control = last_good;
        report.status = TrainStatus::diverged;
        stop = true;
        break;
      }
      if (cfg.max_steps > 0 && report.steps_taken >= cfg.max_steps) {
        report.status = TrainStatus::step_budget;
        stop = true;
      }
    }

    // Epoch-end evaluation over the full dataset.
    EpochRecord rec;
    rec.epoch = epoch;
    try {
      const ObjectiveBreakdown ob =
          objective_value(model, report.control, mu, cfg.reg, cfg.ns);
      const ControlGradient g = control_gradient(model, report.control, mu, req);
      rec.clean_risk = ob.clean_risk;
      rec.reg_term = ob.reg_term;
      rec.objective = ob.objective;
      rec.control_grad_norm = g.max_layer_norm();
    } catch (const NumericError&) {
      report.control = last_good;
      report.status = TrainStatus::diverged;
      stop = true;
    }
    if (report.status == TrainStatus::diverged) break;
    if (!std::isfinite(rec.objective)) {
      report.control = last_good;
      report.status = TrainStatus::diverged;
      break;
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.records.push_back(rec);
    if (on_epoch) on_epoch(rec);
    last_good = report.control;

    if (cfg.convergence_tol > 0.0 && rec.control_grad_norm < cfg.convergence_tol) {
      report.status = TrainStatus::converged;
      break;
    }
  }
  return report;
}

TrainReport train_clean(const Model& model, const EmpiricalMeasure& mu, TrainConfig cfg,
                        const EpochCallback& on_epoch) {
  cfg.reg.variant = RegularizerVariant::clean;
  cfg.reg.delta = 0.0;
  return train(model, mu, cfg, on_epoch);
}

TrainReport train_first_order(const Model& model, const EmpiricalMeasure& mu,
                              TrainConfig cfg, const EpochCallback& on_epoch) {
  cfg.reg.variant = RegularizerVariant::first_order;
  return train(model, mu, cfg, on_epoch);
}

TrainReport train_second_order(const Model& model, const EmpiricalMeasure& mu,
                               TrainConfig cfg, const EpochCallback& on_epoch) {
  cfg.reg.variant = RegularizerVariant::second_order_v1;
  return train(model, mu, cfg, on_epoch);
}

TrainReport train_fgsm(const Model& model, const EmpiricalMeasure& mu, TrainConfig cfg,
                       const EpochCallback& on_epoch) {
  cfg.reg.variant = RegularizerVariant::fgsm;
  return train(model, mu, cfg, on_epoch);
}

}  // namespace wrc
