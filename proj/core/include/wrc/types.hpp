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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace wrc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Rank-3 derivative block: slice i holds the d x d matrix of second
// derivatives of output coordinate i. Index convention: T[i](j,k).
using Tensor3 = std::vector<Mat>;

// Rank-4 derivative block: T[i][j](k,l) for third derivatives of output i.
using Tensor4 = std::vector<Tensor3>;

// Thrown when an argument's dimensions do not match the model.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an operation is asked for something a family/norm combination
// does not provide (e.g. second-order sweeps at finite p).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on numeric breakdown: overflow in a forward pass, unbounded dual, ...
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on invalid user-facing configuration (domains, file formats, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace wrc
