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

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qoptics/io.hpp"

namespace qo {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Schema violation in a config file or command line (exit code 2).
struct ConfigError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

struct ParamSpec {
  enum class Kind { Real, Integer, Text } kind;
  std::string name;
  json default_value;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;  // lo excluded
  bool hi_open = false;
  std::vector<std::string> choices;  // Text only
  std::string help;
};

class Params {
 public:
  explicit Params(json values) : v_(std::move(values)) {}
  double real(const std::string& k) const;
  int integer(const std::string& k) const;
  std::string text(const std::string& k) const;
  const json& values() const { return v_; }

 private:
  json v_;
};

struct RunContext {
  std::uint64_t seed = 1;
  int threads = 1;
};

struct Scenario {
  std::string name;
  std::string summary;
  std::vector<std::string> anchors;  // reproduced formulas and results
  std::vector<ParamSpec> params;
  std::function<SeriesArtifact(const Params&, const RunContext&)> run;
};

const std::vector<Scenario>& registry();
const Scenario& find_scenario(const std::string& name);

struct ScenarioConfig {
  std::string scenario;
  json params = json::object();
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
};

// Rejects unknown keys at every level.
ScenarioConfig parse_config(const json& j);
ScenarioConfig load_config(const std::string& path);

// Defaults merged with overrides, each field type- and range-checked.
Params resolve_params(const Scenario& s, const json& overrides);

SeriesArtifact run_scenario(const ScenarioConfig& cfg, int threads = 1);
// Run i uses seed base + i; results ordered by index.
std::vector<SeriesArtifact> sweep(const ScenarioConfig& cfg, const std::string& param, const std::vector<json>& values,
                                  int threads = 1);

struct PhysicalParams {
  double gamma;  // 1/s
  cplx E;        // 1/s
};
// gamma = c T / (4 L), E = sqrt(2 gamma P_inj / (hbar omega_c)) e^{i phase}; SI inputs.
PhysicalParams physical_params(double T, double L, double P_inj, double omega_c, double phase);

}  // namespace qo
