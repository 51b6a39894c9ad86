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

#include "wrc/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wrc {

namespace {

constexpr const char* kMagic = "wrc-checkpoint v1";

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s, const std::string& path) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw ConfigError("checkpoint " + path + ": bad number '" + s + "'");
  return v;
}

void write_block(std::ofstream& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << hex_double(v[i]);
  }
  out << '\n';
}

Vec read_block(std::istream& in, Eigen::Index n, const std::string& path) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok)) throw ConfigError("checkpoint " + path + ": truncated block");
    v[i] = parse_hex_double(tok, path);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const DynamicsSpec& dspec,
                     const LossSpec& lspec, const ControlPath& ctrl) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out << kMagic << '\n';
  out << "dynamics " << to_string(dspec.family) << '\n';
  out << "terminal " << to_string(lspec.terminal) << '\n';
  out << "running " << to_string(lspec.running) << '\n';
  out << "dim " << dspec.dim << '\n';
  out << "layers " << ctrl.num_layers() << '\n';
  out << "h " << hex_double(ctrl.h) << '\n';
  out << "layer_param_dim " << (ctrl.layers.empty() ? 0 : ctrl.layers.front().size())
      << '\n';
  out << "terminal_param_dim " << ctrl.terminal.size() << '\n';
  for (const Vec& th : ctrl.layers) write_block(out, th);
  write_block(out, ctrl.terminal);
}

ControlPath load_checkpoint(const std::string& path, const DynamicsSpec& dspec,
                            const LossSpec& lspec, const Model& model) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ConfigError("checkpoint " + path + ": unrecognized header");
  }

  const auto expect_field = [&](const std::string& key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key) {
      throw ConfigError("checkpoint " + path + ": expected field '" + key + "'");
    }
    return v;
  };

  const std::string dyn = expect_field("dynamics");
  const std::string ter = expect_field("terminal");
  const std::string run = expect_field("running");
  if (dyn != to_string(dspec.family) || ter != to_string(lspec.terminal) ||
      run != to_string(lspec.running)) {
    throw ConfigError("checkpoint " + path + ": family mismatch (" + dyn + "/" + ter +
                      "/" + run + " vs configured " + to_string(dspec.family) + "/" +
                      to_string(lspec.terminal) + "/" + to_string(lspec.running) + ")");
  }
  const int dim = std::stoi(expect_field("dim"));
  if (dim != dspec.dim) {
    throw ConfigError("checkpoint " + path + ": state dimension mismatch");
  }
  const int layers = std::stoi(expect_field("layers"));
  const double h = parse_hex_double(expect_field("h"), path);
  const Eigen::Index pdim =
      static_cast<Eigen::Index>(std::stol(expect_field("layer_param_dim")));
  const Eigen::Index tdim =
      static_cast<Eigen::Index>(std::stol(expect_field("terminal_param_dim")));
  if (pdim != model.dynamics->param_dim() || tdim != model.terminal->param_dim()) {
    throw ConfigError("checkpoint " + path + ": parameter block shape mismatch");
  }

  ControlPath ctrl;
  ctrl.h = h;
  ctrl.layers.reserve(static_cast<std::size_t>(layers));
  for (int k = 0; k < layers; ++k) ctrl.layers.push_back(read_block(in, pdim, path));
  ctrl.terminal = read_block(in, tdim, path);
  validate_control(model, ctrl);
  return ctrl;
}

}  // namespace wrc
