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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wrc/adversary.hpp"
#include "wrc/model.hpp"
#include "wrc/trainer.hpp"

namespace wrc::cli {

// Flat key=value configuration ("section.key = value", '#' comments). The
// schema is command-specific and strict: unknown keys are rejected so a typo
// cannot silently fall back to a default.
class Config {
 public:
  static Config parse_file(const std::string& path, const std::string& command);
  static Config parse_text(const std::string& text, const std::string& command);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;  // accepts "inf"
  bool get_bool(const std::string& key) const;

  void override_value(const std::string& key, const std::string& value);

  // Fully resolved key -> value map (defaults applied), for the manifest.
  const std::map<std::string, std::string>& resolved() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Typed views assembled from a parsed config.
struct ModelConfig {
  DynamicsSpec dspec;
  LossSpec lspec;
  NormSpec ns;
  int layers = 4;
  double h = 0.1;
};
ModelConfig model_config(const Config& cfg);

TrainConfig train_config(const Config& cfg, const NormSpec& ns);
AttackConfig attack_config(const Config& cfg, const NormSpec& ns);
std::vector<double> sweep_grid(const Config& cfg);

}  // namespace wrc::cli
