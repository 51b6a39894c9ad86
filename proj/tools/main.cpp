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

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wrc - robust training engine for ResNet-style control models"};
  app.require_subcommand(1);

  wrc::cli::RunOptions opts;
  for (const char* name : {"train", "attack", "verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory");
    long seed = 0;
    sub->add_option("--seed", seed, "seed override")
        ->each([&opts](const std::string& v) { opts.seed_override = std::stol(v); });
    sub->add_option("--threads", opts.threads, "worker thread count")
        ->check(CLI::PositiveNumber);
    sub->callback([&opts, name] { opts.command = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return wrc::cli::run(opts);
}
