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

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "wrc/checkpoint.hpp"
#include "wrc/dataset.hpp"
#include "wrc/parallel.hpp"
#include "wrc/verify.hpp"

namespace wrc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

int log_level() {
  const char* env = std::getenv("WRC_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void write_manifest(const fs::path& dir, const RunOptions& opts, const Config& cfg) {
  json m;
  m["command"] = opts.command;
  m["version"] = kVersion;
  m["threads"] = opts.threads;
  json resolved;
  for (const auto& [k, v] : cfg.resolved()) resolved[k] = v;
  m["config"] = resolved;
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

ControlPath control_from(const Config& cfg, const ModelConfig& mc, const Model& model,
                         const std::string& checkpoint_key) {
  if (cfg.has(checkpoint_key)) {
    return load_checkpoint(cfg.get_string(checkpoint_key), mc.dspec, mc.lspec, model);
  }
  return make_zero_control(model, mc.layers, mc.h);
}

int cmd_train(const RunOptions& opts, const Config& cfg, const fs::path& out_dir) {
  const ModelConfig mc = model_config(cfg);
  const Model model = make_model(mc.dspec, mc.lspec);
  const EmpiricalMeasure mu = load_dataset(cfg.get_string("data.path"));
  const TrainConfig tc = train_config(cfg, mc.ns);

  std::ofstream metrics(out_dir / "metrics.jsonl");
  std::ofstream timings(out_dir / "timings.jsonl");
  const int lvl = log_level();

  const auto on_epoch = [&](const EpochRecord& rec) {
    json row;
    row["epoch"] = rec.epoch;
    row["clean_risk"] = rec.clean_risk;
    row["reg_term"] = rec.reg_term;
    row["objective"] = rec.objective;
    row["control_grad_norm"] = rec.control_grad_norm;
    metrics << row.dump() << '\n';
    // wall time varies run to run, so it lives outside the metrics stream
    json t;
    t["epoch"] = rec.epoch;
    t["wall_time"] = rec.wall_time;
    timings << t.dump() << '\n';
    if (lvl >= 1) {
      std::cerr << "epoch " << rec.epoch << " objective " << rec.objective
                << " grad_norm " << rec.control_grad_norm << '\n';
    }
  };

  const TrainReport report = train(model, mu, tc, on_epoch);
  save_checkpoint((out_dir / "checkpoint.txt").string(), mc.dspec, mc.lspec,
                  report.control);

  json summary;
  summary["status"] = to_string(report.status);
  summary["steps"] = report.steps_taken;
  summary["epochs_recorded"] = report.records.size();
  summary["degenerate_samples"] = report.degenerate_samples;
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';
  std::cout << summary.dump() << '\n';

  return report.status == TrainStatus::diverged ? kExitNumeric : kExitOk;
}

int cmd_attack(const RunOptions& opts, const Config& cfg, const fs::path& out_dir) {
  const ModelConfig mc = model_config(cfg);
  const Model model = make_model(mc.dspec, mc.lspec);
  const EmpiricalMeasure mu = load_dataset(cfg.get_string("data.path"));
  const ControlPath ctrl = control_from(cfg, mc, model, "attack.checkpoint");
  const AttackConfig ac = attack_config(cfg, mc.ns);

  const AttackResult res = mc.ns.p_finite()
                               ? pga_attack_wasserstein(model, ctrl, mu, ac)
                               : pga_attack_pointwise(model, ctrl, mu, ac);

  json r;
  r["value"] = res.value;
  r["clean_risk"] = risk(model, ctrl, mu);
  r["transport_cost"] = res.transport_cost;
  r["delta"] = ac.delta;
  r["per_restart"] = res.per_restart;
  r["lower_bound_only"] = res.lower_bound_only;
  std::ofstream(out_dir / "attack.json") << r.dump(2) << '\n';
  std::cout << r.dump() << '\n';

  EmpiricalMeasure pert = mu;
  pert.points = res.perturbed;
  save_dataset((out_dir / "perturbed.csv").string(), pert);
  return kExitOk;
}

int cmd_verify(const RunOptions& opts, const Config& cfg, const fs::path& out_dir) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("verify.seed"));
  const auto reports = run_default_suite(seed);

  std::ofstream records(out_dir / "checks.jsonl");
  bool all_pass = true;
  std::printf("%-44s %12s %12s %6s\n", "check", "rel_error", "tolerance", "pass");
  for (const CheckReport& r : reports) {
    all_pass = all_pass && r.pass;
    std::printf("%-44s %12.3e %12.3e %6s\n", r.name.c_str(), r.rel_error, r.tolerance,
                r.pass ? "yes" : "NO");
    json row;
    row["name"] = r.name;
    row["max_abs_error"] = r.max_abs_error;
    row["rel_error"] = r.rel_error;
    row["tolerance"] = r.tolerance;
    row["pass"] = r.pass;
    row["metadata"] = r.metadata;
    records << row.dump() << '\n';
  }
  std::printf("%zu checks, %s\n", reports.size(), all_pass ? "all passed" : "FAILURES");
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunOptions& opts, const Config& cfg, const fs::path& out_dir) {
  const ModelConfig mc = model_config(cfg);
  const Model model = make_model(mc.dspec, mc.lspec);
  const EmpiricalMeasure mu = load_dataset(cfg.get_string("data.path"));
  const ControlPath ctrl = control_from(cfg, mc, model, "sweep.checkpoint");
  const auto grid = sweep_grid(cfg);

  std::ofstream rows(out_dir / "sweep.jsonl");
  std::printf("%12s %14s %14s %14s %14s\n", "delta", "oracle", "first_order",
              "second_order", "gap");
  std::vector<Vec> warm;  // previous grid point's displacement, rescaled
  std::vector<Vec>* warm_ptr = nullptr;
  double prev_delta = 0.0;
  for (double delta : grid) {
    if (warm_ptr && prev_delta > 0.0) {
      for (Vec& u : warm) u *= delta / prev_delta;
    }
    std::vector<Vec> disp;
    const double oracle =
        robust_risk_oracle(model, ctrl, mu, delta, mc.ns, warm_ptr, &disp);
    warm = std::move(disp);
    warm_ptr = &warm;
    prev_delta = delta;

    const double fo = first_order_objective(model, ctrl, mu, delta, mc.ns);
    double so = std::numeric_limits<double>::quiet_NaN();
    if (mc.ns.ground == GroundNorm::euclidean) {
      so = second_order_v1_objective(model, ctrl, mu, delta, mc.ns);
    }
    const double gap = oracle - fo;
    std::printf("%12.4e %14.8f %14.8f %14.8f %14.4e\n", delta, oracle, fo, so, gap);
    json row;
    row["delta"] = delta;
    row["oracle"] = oracle;
    row["first_order"] = fo;
    if (std::isfinite(so)) row["second_order"] = so;
    row["gap"] = gap;
    rows << row.dump() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const RunOptions& opts) {
  try {
    const Config cfg = Config::parse_file(opts.config_path, opts.command);
    Config resolved = cfg;
    if (opts.seed_override) {
      for (const char* key : {"train.seed", "attack.seed", "verify.seed"}) {
        try {
          resolved.override_value(key, std::to_string(*opts.seed_override));
        } catch (const ConfigError&) {
          // key not in this command's schema
        }
      }
    }
    set_num_threads(opts.threads);

    const fs::path out_dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
    fs::create_directories(out_dir);
    write_manifest(out_dir, opts, resolved);

    if (opts.command == "train") return cmd_train(opts, resolved, out_dir);
    if (opts.command == "attack") return cmd_attack(opts, resolved, out_dir);
    if (opts.command == "verify") return cmd_verify(opts, resolved, out_dir);
    if (opts.command == "sweep") return cmd_sweep(opts, resolved, out_dir);
    std::cerr << "unknown command: " << opts.command << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapabilityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace wrc::cli
