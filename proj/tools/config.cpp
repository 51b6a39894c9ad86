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

#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wrc::cli {

namespace {

struct KeySpec {
  std::string def;          // default value ("" + required => must be present)
  bool required = false;
  std::string commands;     // comma list, or "*" for every command
};

// The full schema; docs/config_schema.md mirrors this table.
const std::map<std::string, KeySpec>& schema() {
  static const std::map<std::string, KeySpec> s = {
      {"model.family", {"tanh_resnet", false, "*"}},
      {"model.dim", {"", true, "*"}},
      {"model.layers", {"4", false, "*"}},
      {"model.h", {"0.1", false, "*"}},
      {"loss.terminal", {"squared_regression", false, "*"}},
      {"loss.running", {"zero", false, "*"}},
      {"loss.ridge_coeff", {"0", false, "*"}},
      {"norm.p", {"inf", false, "*"}},
      {"norm.ground", {"euclidean", false, "*"}},
      {"data.path", {"", true, "train,attack,sweep"}},
      {"out.prefix", {"run", false, "*"}},

      {"train.variant", {"clean", false, "train"}},
      {"train.delta", {"0", false, "train"}},
      {"train.lr", {"0.1", false, "train"}},
      {"train.batch_size", {"32", false, "train"}},
      {"train.epochs", {"20", false, "train"}},
      {"train.seed", {"0", false, "train"}},
      {"train.convergence_tol", {"0", false, "train"}},
      {"train.max_steps", {"0", false, "train"}},
      {"train.alpha_mix", {"0.5", false, "train"}},
      {"train.mc_directions", {"32", false, "train"}},
      {"train.stats_scope", {"batch", false, "train"}},
      {"train.min_batch", {"32", false, "train"}},

      {"attack.delta", {"0.1", false, "attack"}},
      {"attack.steps", {"200", false, "attack"}},
      {"attack.step_size", {"0", false, "attack"}},
      {"attack.restarts", {"8", false, "attack"}},
      {"attack.seed", {"0", false, "attack"}},
      {"attack.checkpoint", {"", false, "attack"}},
      {"attack.freeze_coords", {"", false, "attack"}},

      {"verify.seed", {"20260810", false, "verify"}},

      {"sweep.delta_grid", {"1e-3,3e-3,1e-2,3e-2,1e-1", false, "sweep"}},
      {"sweep.checkpoint", {"", false, "sweep"}},
  };
  return s;
}

bool key_allowed(const KeySpec& spec, const std::string& command) {
  if (spec.commands == "*") return true;
  std::stringstream ss(spec.commands);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == command) return true;
  }
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_text(const std::string& text, const std::string& command) {
  Config cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, std::string> given;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = schema().find(key);
    if (it == schema().end() || !key_allowed(it->second, command)) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                        key + "' for command '" + command + "'");
    }
    if (given.count(key)) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    }
    given[key] = value;
  }
  // apply defaults; enforce required keys
  for (const auto& [key, spec] : schema()) {
    if (!key_allowed(spec, command)) continue;
    const auto it = given.find(key);
    if (it != given.end()) {
      cfg.values_[key] = it->second;
    } else if (spec.required) {
      throw ConfigError("config: missing required key '" + key + "'");
    } else {
      cfg.values_[key] = spec.def;
    }
  }
  return cfg;
}

Config Config::parse_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), command);
}

bool Config::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config key not in schema: " + key);
  return it->second;
}

long Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  const long out = std::strtol(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty()) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  }
  return out;
}

double Config::get_real(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "inf" || v == "Inf" || v == "infinity") return kInf;
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty()) {
    throw ConfigError("config key '" + key + "': expected real, got '" + v + "'");
  }
  return out;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected bool, got '" + v + "'");
}

void Config::override_value(const std::string& key, const std::string& value) {
  if (!values_.count(key)) throw ConfigError("cannot override unknown key: " + key);
  values_[key] = value;
}

ModelConfig model_config(const Config& cfg) {
  ModelConfig mc;
  mc.dspec.family = dynamics_family_from_string(cfg.get_string("model.family"));
  mc.dspec.dim = static_cast<int>(cfg.get_int("model.dim"));
  mc.lspec.terminal = terminal_family_from_string(cfg.get_string("loss.terminal"));
  mc.lspec.running = running_family_from_string(cfg.get_string("loss.running"));
  mc.lspec.ridge_coeff = cfg.get_real("loss.ridge_coeff");
  const std::string ground = cfg.get_string("norm.ground");
  if (ground != "euclidean" && ground != "max_abs") {
    throw ConfigError("norm.ground must be euclidean or max_abs");
  }
  mc.ns = make_norm_spec(cfg.get_real("norm.p"), ground == "euclidean"
                                                     ? GroundNorm::euclidean
                                                     : GroundNorm::max_abs);
  mc.layers = static_cast<int>(cfg.get_int("model.layers"));
  mc.h = cfg.get_real("model.h");
  if (mc.layers < 1) throw ConfigError("model.layers must be >= 1");
  if (!(mc.h > 0.0)) throw ConfigError("model.h must be positive");
  return mc;
}

TrainConfig train_config(const Config& cfg, const NormSpec& ns) {
  TrainConfig tc;
  tc.reg.variant = regularizer_variant_from_string(cfg.get_string("train.variant"));
  tc.reg.delta = cfg.get_real("train.delta");
  tc.reg.alpha_mix = cfg.get_real("train.alpha_mix");
  tc.reg.m = static_cast<int>(cfg.get_int("train.mc_directions"));
  tc.reg.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed"));
  tc.ns = ns;
  tc.lr = cfg.get_real("train.lr");
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch_size"));
  tc.epochs = static_cast<int>(cfg.get_int("train.epochs"));
  tc.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed"));
  tc.h = cfg.get_real("model.h");
  tc.layers = static_cast<int>(cfg.get_int("model.layers"));
  tc.convergence_tol = cfg.get_real("train.convergence_tol");
  tc.max_steps = static_cast<int>(cfg.get_int("train.max_steps"));
  tc.min_batch_finite_p = static_cast<int>(cfg.get_int("train.min_batch"));
  const std::string scope = cfg.get_string("train.stats_scope");
  if (scope == "batch") {
    tc.stats_scope = StatsScope::batch;
  } else if (scope == "dataset") {
    tc.stats_scope = StatsScope::dataset;
  } else {
    throw ConfigError("train.stats_scope must be batch or dataset");
  }
  return tc;
}

AttackConfig attack_config(const Config& cfg, const NormSpec& ns) {
  AttackConfig ac;
  ac.delta = cfg.get_real("attack.delta");
  ac.ns = ns;
  ac.steps = static_cast<int>(cfg.get_int("attack.steps"));
  ac.step_size = cfg.get_real("attack.step_size");
  ac.restarts = static_cast<int>(cfg.get_int("attack.restarts"));
  ac.seed = static_cast<std::uint64_t>(cfg.get_int("attack.seed"));
  if (cfg.has("attack.freeze_coords")) {
    std::stringstream ss(cfg.get_string("attack.freeze_coords"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) ac.frozen_coords.push_back(std::stoi(tok));
    }
  }
  if (ac.delta < 0.0) throw ConfigError("attack.delta must be nonnegative");
  return ac;
}

std::vector<double> sweep_grid(const Config& cfg) {
  std::vector<double> grid;
  std::stringstream ss(cfg.get_string("sweep.delta_grid"));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
      throw ConfigError("sweep.delta_grid: bad value '" + tok + "'");
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw ConfigError("sweep.delta_grid is empty");
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace wrc::cli
