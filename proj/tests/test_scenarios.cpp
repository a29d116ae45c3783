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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "qoptics/scenarios.hpp"

using namespace qo;

namespace {

ScenarioConfig config(const std::string& name, json params = json::object()) {
  ScenarioConfig c;
  c.scenario = name;
  c.params = std::move(params);
  return c;
}

std::string to_json_text(const SeriesArtifact& a) {
  std::ostringstream os;
  write_json(artifact_to_json(a), os);
  return os.str();
}

const Column& column(const SeriesArtifact& a, const std::string& name) {
  for (const auto& c : a.columns)
    if (c.name == name) return c;
  FAIL("missing column " << name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("registry lists every scenario with anchors") {
  const std::vector<std::string> want = {"rabi-bloch",        "collapse-revival", "pdc-instability",
                                         "driven-cavity",     "spontaneous-emission", "dephasing",
                                         "thermal-g2",        "resonance-fluorescence", "opo-squeezing",
                                         "opo-g2",            "purcell-cooling",  "wigner-gallery",
                                         "kerr-cat",          "optomech-cooling"};
  std::set<std::string> have;
  for (const auto& s : registry()) {
    have.insert(s.name);
    CHECK(!s.anchors.empty());
    CHECK_NOTHROW(resolve_params(s, json::object()));
  }
  for (const auto& w : want) CHECK(have.count(w) == 1);
  CHECK_THROWS_AS(find_scenario("nope"), ConfigError);
}

TEST_CASE("config parsing rejects unknown keys and bad types") {
  const json ok = json::parse(R"({"scenario":"dephasing","params":{"gamma_phi":2},"seed":5,
                                  "output":{"path":"x.csv","format":"csv"}})");
  const ScenarioConfig c = parse_config(ok);
  CHECK(c.scenario == "dephasing");
  CHECK(c.seed == 5u);
  CHECK(c.format == "csv");
  CHECK_THROWS_AS(parse_config(json::parse(R"({"scenario":"dephasing","extra":1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"output":{"colour":"red"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"output":{"format":"xml"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"seed":-3})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse("[1]")), ConfigError);
}

TEST_CASE("parameter resolution gives field-level messages") {
  const Scenario& s = find_scenario("opo-squeezing");
  auto message = [&](const json& o) {
    try {
      resolve_params(s, o);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(json{{"sigma", 1.0}}).find("params.sigma") == 0);
  CHECK(message(json{{"gamma", -1.0}}).find("params.gamma") == 0);
  CHECK(message(json{{"gamma", "fast"}}).find("must be a number") != std::string::npos);
  CHECK(message(json{{"n_Omega", 2.5}}).find("must be an integer") != std::string::npos);
  CHECK(message(json{{"bogus", 1}}).find("unknown parameter") != std::string::npos);
  const Params p = resolve_params(s, json{{"sigma", 0.2}});
  CHECK(p.real("sigma") == 0.2);
  CHECK(p.real("gamma") == 1.0);
  CHECK(message(json::object()).empty());
  CHECK(!message(json{{"state", "banana"}}).empty());
  CHECK_THROWS_AS(resolve_params(find_scenario("wigner-gallery"), json{{"state", "banana"}}), ConfigError);
}

TEST_CASE("artifacts carry complete metadata") {
  const SeriesArtifact a = run_scenario(config("dephasing", {{"n_t", 11}}));
  const json& m = a.metadata;
  for (const char* k : {"scenario", "params", "toolkit_version", "anchors", "seed", "warnings", "notes", "results"})
    CHECK(m.contains(k));
  CHECK(m["scenario"] == "dephasing");
  CHECK(m["params"]["n_t"] == 11);
  CHECK(m["toolkit_version"] == kToolkitVersion);
  CHECK(a.rows() == 11);
}

TEST_CASE("thermal-g2 columns agree") {
  const SeriesArtifact a = run_scenario(config("thermal-g2", {{"n_tau", 11}}));
  const Column& an = column(a, "g2_analytic");
  const Column& rg = column(a, "g2_regression");
  for (std::size_t i = 0; i < an.re.size(); ++i) CHECK(std::abs(an.re[i] - rg.re[i]) < 1e-8);
}

TEST_CASE("wigner-gallery states integrate to one") {
  for (const char* st : {"fock", "coherent", "squeezed", "thermal", "cat"}) {
    const SeriesArtifact a = run_scenario(config("wigner-gallery", {{"state", st}, {"n_grid", 201}}));
    CHECK(std::abs(a.metadata["results"]["integral"].get<double>() - 1.0) <= 1e-6);
    REQUIRE(a.grid.has_value());
    if (a.metadata["results"].contains("max_abs_error_exact"))
      CHECK(a.metadata["results"]["max_abs_error_exact"].get<double>() < 1e-8);
  }
  const SeriesArtifact f = run_scenario(config("wigner-gallery", {{"state", "fock"}, {"n", 1}}));
  CHECK(std::abs(f.metadata["results"]["integral"].get<double>() - 1.0) <= 1e-6);
}

TEST_CASE("kerr-cat reaches the cat state") {
  const SeriesArtifact a = run_scenario(config("kerr-cat", {{"n_grid", 129}}));
  CHECK(std::abs(a.metadata["results"]["fidelity_with_cat"].get<double>() - 1.0) < 1e-10);
}

TEST_CASE("JSON artifacts round-trip bit-exactly") {
  for (const char* name : {"dephasing", "driven-cavity", "resonance-fluorescence"}) {
    const SeriesArtifact a = run_scenario(config(name));
    const std::string text = to_json_text(a);
    const SeriesArtifact b = artifact_from_json(json::parse(text));
    REQUIRE(a.columns.size() == b.columns.size());
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
      CHECK(a.columns[c].name == b.columns[c].name);
      CHECK(std::memcmp(a.columns[c].re.data(), b.columns[c].re.data(), a.columns[c].re.size() * sizeof(double)) == 0);
      CHECK(a.columns[c].im == b.columns[c].im);
    }
    CHECK(to_json_text(b) == text);
  }
}

TEST_CASE("shortest round-trip formatting") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t u = bits(rng);
    double v;
    std::memcpy(&v, &u, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK_THROWS_AS(format_double(std::nan("")), NumericError);
}

TEST_CASE("CSV splits complex columns") {
  SeriesArtifact a;
  a.add("t", std::vector<double>{0.0, 0.5});
  a.add("z", std::vector<cplx>{{1, 2}, {3, -4}});
  std::ostringstream os;
  write_csv(a, os);
  CHECK(os.str() == "t,z_re,z_im\n0,1,2\n0.5,3,-4\n");
  a.add("bad", std::vector<double>{1.0});
  CHECK_THROWS_AS(a.validate(), NumericError);
}

TEST_CASE("sweeps are ordered, seeded by index and thread independent") {
  ScenarioConfig c = config("spontaneous-emission", {{"n_traj", 200}, {"n_t", 6}, {"t_max", 1.0}});
  c.seed = 10;
  const std::vector<json> vals = {0.5, 1.0, 2.0};
  const auto one = sweep(c, "gamma", vals, 1);
  const auto three = sweep(c, "gamma", vals, 3);
  REQUIRE(one.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one[i].metadata["seed"] == 10 + i);
    CHECK(one[i].metadata["params"]["gamma"] == vals[i]);
    CHECK(to_json_text(one[i]) == to_json_text(three[i]));
  }
  CHECK(sweep(c, "gamma", {}, 2).empty());
  CHECK_THROWS_AS(sweep(c, "nope", vals), ConfigError);
  CHECK_THROWS_AS(sweep(c, "gamma", {json(-1.0)}), ConfigError);
}

TEST_CASE("squeezing deepens toward threshold") {
  std::vector<json> vals;
  for (int k = 1; k <= 9; ++k) vals.push_back(0.1 * k);
  const auto runs = sweep(config("opo-squeezing", {{"n_Omega", 3}}), "sigma", vals, 2);
  double prev = 1.0;
  for (const auto& r : runs) {
    const double v = column(r, "Vpi2").re[0];
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("scenario runs are reproducible") {
  const ScenarioConfig c = config("spontaneous-emission", {{"n_traj", 300}, {"n_t", 5}});
  CHECK(to_json_text(run_scenario(c, 1)) == to_json_text(run_scenario(c, 4)));
  ScenarioConfig d = c;
  d.seed = 2;
  CHECK(to_json_text(run_scenario(c)) != to_json_text(run_scenario(d)));
}

TEST_CASE("physical parameter conversions") {
  const PhysicalParams a = physical_params(0.01, 0.1, 1e-3, 2e15, 0.3);
  const PhysicalParams b = physical_params(0.02, 0.1, 1e-3, 2e15, 0.3);
  CHECK(b.gamma == doctest::Approx(2 * a.gamma));
  CHECK(a.gamma == doctest::Approx(299792458.0 * 0.01 / 0.4));
  const PhysicalParams c = physical_params(0.01, 0.1, 4e-3, 2e15, 0.3);
  CHECK(std::abs(c.E) == doctest::Approx(2 * std::abs(a.E)));
  CHECK(std::arg(a.E) == doctest::Approx(0.3));
  CHECK_THROWS_AS(physical_params(0.5, 0.1, 1e-3, 2e15, 0), InvalidArgument);
  CHECK_THROWS_AS(physical_params(0.0, 0.1, 1e-3, 2e15, 0), InvalidArgument);
  CHECK_THROWS_AS(physical_params(0.1, -1, 1e-3, 2e15, 0), InvalidArgument);
}
