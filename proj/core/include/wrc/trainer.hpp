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

#include <functional>

#include "wrc/objectives.hpp"

namespace wrc {

enum class StatsScope { batch, dataset };
enum class TrainStatus { epoch_budget, converged, step_budget, diverged };

struct TrainConfig {
  RegularizerSpec reg;
  NormSpec ns;
  double lr = 0.1;
  int batch_size = 32;
  int epochs = 20;
  std::uint64_t seed = 0;
  double h = 0.1;
  int layers = 4;
  double convergence_tol = 0.0;  // 0 disables the gradient-norm stop
  int max_steps = 0;             // 0 disables the step cap
  int min_batch_finite_p = 32;   // minimum batch for mean-field variants
  StatsScope stats_scope = StatsScope::batch;
};

struct EpochRecord {
  int epoch = 0;
  double clean_risk = 0.0;
  double reg_term = 0.0;
  double objective = 0.0;
  double control_grad_norm = 0.0;
  double wall_time = 0.0;  // seconds; excluded from deterministic outputs
};

struct TrainReport {
  std::vector<EpochRecord> records;
  ControlPath control;
  TrainStatus status = TrainStatus::epoch_budget;
  int steps_taken = 0;
  int degenerate_samples = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

std::string to_string(TrainStatus s);

// Batched SGD on the configured objective. Controls start at zero; each epoch
// visits a seeded permutation of the data in contiguous batches, sweeps the
// adjoint systems per sample and steps every layer block and the terminal
// parameters against the exact batch gradient. Divergence returns the last
// epoch-end state with status diverged instead of throwing.
TrainReport train(const Model& model, const EmpiricalMeasure& mu,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = nullptr);

// Variant-specific entry points (thin wrappers that pin cfg.reg.variant).
TrainReport train_clean(const Model& model, const EmpiricalMeasure& mu,
                        TrainConfig cfg, const EpochCallback& on_epoch = nullptr);
TrainReport train_first_order(const Model& model, const EmpiricalMeasure& mu,
                              TrainConfig cfg, const EpochCallback& on_epoch = nullptr);
TrainReport train_second_order(const Model& model, const EmpiricalMeasure& mu,
                               TrainConfig cfg, const EpochCallback& on_epoch = nullptr);
TrainReport train_fgsm(const Model& model, const EmpiricalMeasure& mu,
                       TrainConfig cfg, const EpochCallback& on_epoch = nullptr);

}  // namespace wrc
