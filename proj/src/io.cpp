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

#include "qoptics/io.hpp"

#include <charconv>
#include <cmath>

namespace qo {

void SeriesArtifact::add(std::string name, std::vector<double> values) {
  columns.push_back({std::move(name), std::move(values), {}});
}

void SeriesArtifact::add(std::string name, const std::vector<cplx>& values) {
  Column c{std::move(name), {}, {}};
  c.re.reserve(values.size());
  c.im.reserve(values.size());
  for (const auto& v : values) {
    c.re.push_back(v.real());
    c.im.push_back(v.imag());
  }
  columns.push_back(std::move(c));
}

std::size_t SeriesArtifact::rows() const { return columns.empty() ? 0 : columns.front().re.size(); }

void SeriesArtifact::validate() const {
  for (const auto& c : columns) {
    if (c.re.size() != rows() || (c.is_complex() && c.im.size() != c.re.size()))
      throw NumericError("artifact column '" + c.name + "' has length " + std::to_string(c.re.size()) +
                         ", expected " + std::to_string(rows()));
    for (std::size_t i = 0; i < c.re.size(); ++i)
      if (!std::isfinite(c.re[i]) || (c.is_complex() && !std::isfinite(c.im[i])))
        throw NumericError("artifact column '" + c.name + "' has a non-finite value at row " + std::to_string(i));
  }
}

std::string format_double(double v) {
  if (!std::isfinite(v)) throw NumericError("cannot serialize non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const SeriesArtifact& a, std::ostream& os) {
  a.validate();
  bool first = true;
  for (const auto& c : a.columns) {
    if (c.is_complex())
      os << (first ? "" : ",") << c.name << "_re," << c.name << "_im";
    else
      os << (first ? "" : ",") << c.name;
    first = false;
  }
  os << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    first = true;
    for (const auto& c : a.columns) {
      os << (first ? "" : ",") << format_double(c.re[i]);
      if (c.is_complex()) os << ',' << format_double(c.im[i]);
      first = false;
    }
    os << '\n';
  }
}

void write_gnuplot_matrix(const WignerGrid& w, std::ostream& os) {
  const RVec xs = w.grid.xs(), ps = w.grid.ps();
  os << format_double(static_cast<double>(w.grid.np));
  for (int k = 0; k < w.grid.np; ++k) os << ' ' << format_double(ps(k));
  os << '\n';
  for (int i = 0; i < w.grid.nx; ++i) {
    os << format_double(xs(i));
    for (int k = 0; k < w.grid.np; ++k) os << ' ' << format_double(w.values(i, k));
    os << '\n';
  }
}

namespace {

void emit(const json& j, std::ostream& os) {
  switch (j.type()) {
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      break;
    case json::value_t::array: {
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << ',';
        emit(e, os);
        first = false;
      }
      os << ']';
      break;
    }
    case json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        os << json(it.key()).dump() << ':';
        emit(it.value(), os);
        first = false;
      }
      os << '}';
      break;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

void write_json(const json& j, std::ostream& os) {
  emit(j, os);
  os << '\n';
}

json artifact_to_json(const SeriesArtifact& a) {
  a.validate();
  json cols = json::array();
  for (const auto& c : a.columns) {
    json o = {{"name", c.name}, {"re", c.re}};
    if (c.is_complex()) o["im"] = c.im;
    cols.push_back(std::move(o));
  }
  return {{"metadata", a.metadata}, {"columns", std::move(cols)}};
}

SeriesArtifact artifact_from_json(const json& j) {
  SeriesArtifact a;
  a.metadata = j.at("metadata");
  for (const auto& c : j.at("columns")) {
    Column col{c.at("name").get<std::string>(), c.at("re").get<std::vector<double>>(), {}};
    if (c.contains("im")) col.im = c.at("im").get<std::vector<double>>();
    a.columns.push_back(std::move(col));
  }
  return a;
}

}  // namespace qo
