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

#include <string>

#include "config.hpp"

namespace wrc::cli {

// Exit codes: 0 success, 1 verification failures, 2 config/schema errors,
// 3 numeric failures (divergence, overflow, unbounded dual).
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<long> seed_override;
  int threads = 1;
};

int run(const RunOptions& opts);

}  // namespace wrc::cli
