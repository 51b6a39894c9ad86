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

#include "wrc/dataset.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wrc {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) {
        cells.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) cells.push_back(cur);
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size() && end != begin;
}

}  // namespace

EmpiricalMeasure load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);

  std::vector<Vec> points;
  Eigen::Index width = -1;
  std::string line;
  int lineno = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cells = split_cells(line);
    if (cells.empty()) continue;  // blank line
    if (!cells.front().empty() && cells.front()[0] == '#') continue;

    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const std::string& c : cells) {
      double v;
      if (!parse_double(c, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_content_row) {
        first_content_row = false;  // header row, skip
        continue;
      }
      throw ConfigError("dataset " + path + ": non-numeric cell at line " +
                        std::to_string(lineno));
    }
    first_content_row = false;
    if (width < 0) {
      width = static_cast<Eigen::Index>(row.size());
    } else if (static_cast<Eigen::Index>(row.size()) != width) {
      throw ConfigError("dataset " + path + ": ragged row at line " +
                        std::to_string(lineno) + " (expected " +
                        std::to_string(width) + " columns, got " +
                        std::to_string(row.size()) + ")");
    }
    points.push_back(Eigen::Map<const Vec>(row.data(), width));
  }
  if (points.empty()) {
    throw ConfigError("dataset " + path + ": no data rows");
  }
  return EmpiricalMeasure::uniform(std::move(points));
}

void save_dataset(const std::string& path, const EmpiricalMeasure& mu) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset file: " + path);
  out << std::setprecision(17);
  for (const Vec& x : mu.points) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (i) out << ',';
      out << x[i];
    }
    out << '\n';
  }
}

}  // namespace wrc
