// Copyright 2026 The qoptics Authors
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

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoptics/phase_space.hpp"

namespace qo {

using json = nlohmann::ordered_json;

struct Column {
  std::string name;
  std::vector<double> re;
  std::vector<double> im;  // empty for real columns
  bool is_complex() const { return !im.empty(); }
};

struct SeriesArtifact {
  std::vector<Column> columns;
  json metadata;
  std::optional<WignerGrid> grid;  // set by phase-space scenarios

  void add(std::string name, std::vector<double> values);
  void add(std::string name, const std::vector<cplx>& values);
  std::size_t rows() const;
  void validate() const;  // equal column lengths, finite values
};

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

void write_csv(const SeriesArtifact& a, std::ostream& os);
// gnuplot "nonuniform matrix" block: first row np then p values, each following row x then W(x, p_j).
void write_gnuplot_matrix(const WignerGrid& w, std::ostream& os);
void write_json(const json& j, std::ostream& os);
json artifact_to_json(const SeriesArtifact& a);
SeriesArtifact artifact_from_json(const json& j);

}  // namespace qo
