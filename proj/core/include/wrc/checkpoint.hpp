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

#include "wrc/model.hpp"

namespace wrc {

// Versioned text checkpoint for a trained control path. Parameters are
// written as C99 hexadecimal floating point literals, so a save/load round
// trip is bit-identical; the format is documented in docs/checkpoint_format.md.
void save_checkpoint(const std::string& path, const DynamicsSpec& dspec,
                     const LossSpec& lspec, const ControlPath& ctrl);

// Loads and validates against the expected model family and dimensions.
// Mismatched family identifiers or shapes raise ConfigError.
ControlPath load_checkpoint(const std::string& path, const DynamicsSpec& dspec,
                            const LossSpec& lspec, const Model& model);

}  // namespace wrc
