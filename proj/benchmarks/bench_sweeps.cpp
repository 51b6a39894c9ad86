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

#include <benchmark/benchmark.h>

#include "wrc/objectives.hpp"
#include "wrc/propagation.hpp"
#include "wrc/rng.hpp"

namespace {

using namespace wrc;

struct Fixture {
  Model model;
  ControlPath ctrl;
  Vec x;

  Fixture(int d, int layers) {
    DynamicsSpec dspec{DynamicsFamily::tanh_resnet, d};
    LossSpec lspec{TerminalFamily::quadratic_to_target, RunningFamily::zero, 0.0};
    model = make_model(dspec, lspec);
    ctrl = make_zero_control(model, layers, 0.05);
    Rng rng(1234);
    for (Vec& th : ctrl.layers) th = 0.4 * rng.normal_vec(th.size());
    ctrl.terminal = rng.normal_vec(d);
    x = rng.normal_vec(d);
  }
};

void BM_ForwardBackward(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    const Trajectory traj = forward_state(f.model, f.ctrl, f.x);
    auto P = backward_costate(f.model, f.ctrl, traj);
    benchmark::DoNotOptimize(P[0]);
  }
}
BENCHMARK(BM_ForwardBackward)->Args({2, 8})->Args({4, 8})->Args({8, 16});

void BM_FirstOrderAdjoints(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
  for (auto _ : state) {
    const Trajectory traj = forward_state(f.model, f.ctrl, f.x);
    const auto P = backward_costate(f.model, f.ctrl, traj);
    const BatchStats stats = make_batch_stats({P[0]}, {1.0}, 0.1, ns);
    const auto beta = forward_beta(f.model, f.ctrl, traj, P[0], stats, 0.1, ns);
    auto ab = backward_alpha(f.model, f.ctrl, traj, P, beta);
    benchmark::DoNotOptimize(ab.second[0]);
  }
}
BENCHMARK(BM_FirstOrderAdjoints)->Args({2, 8})->Args({4, 8})->Args({8, 16});

void BM_SecondOrderBundle(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const NormSpec ns = make_norm_spec(kInf, GroundNorm::euclidean);
  const Trajectory traj = forward_state(f.model, f.ctrl, f.x);
  AdjointBundle1 b1;
  b1.P = backward_costate(f.model, f.ctrl, traj);
  const BatchStats stats = make_batch_stats({b1.P[0]}, {1.0}, 0.1, ns);
  b1.beta = forward_beta(f.model, f.ctrl, traj, b1.P[0], stats, 0.1, ns);
  std::tie(b1.alpha, b1.alpha_hat) = backward_alpha(f.model, f.ctrl, traj, b1.P, b1.beta);
  for (auto _ : state) {
    auto b2 = second_order_sweeps(f.model, f.ctrl, traj, b1, 0.1, ns);
    benchmark::DoNotOptimize(b2.phi[0]);
  }
}
BENCHMARK(BM_SecondOrderBundle)->Args({2, 8})->Args({4, 8})->Args({8, 16});

void BM_LossEval(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_j(f.model, f.ctrl, f.x));
  }
}
BENCHMARK(BM_LossEval)->Args({4, 8})->Args({8, 16});

}  // namespace

BENCHMARK_MAIN();
