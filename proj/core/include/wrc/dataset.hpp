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

#include "wrc/measure.hpp"

namespace wrc {

// Delimited text, one sample per row, comma or whitespace separated. A
// leading non-numeric row is treated as a header and skipped. Ragged rows,
// non-numeric cells and empty files raise ConfigError with the line number.
// Weights are uniform.
EmpiricalMeasure load_dataset(const std::string& path);

// Writes points with round-trip precision (17 significant digits).
void save_dataset(const std::string& path, const EmpiricalMeasure& mu);

}  // namespace wrc
