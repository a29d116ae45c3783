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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qoptics/scenarios.hpp"

namespace {

using qo::json;

struct Common {
  std::string scenario;
  std::string config;
  std::string out;
  std::string format;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 1;
};

void add_common(CLI::App* c, Common& o) {
  c->add_option("scenario", o.scenario, "scenario name (optional when the config names one)");
  c->add_option("--config", o.config, "JSON config file");
  c->add_option("--out", o.out, "output path; '-' for stdout");
  c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  c->add_option("--set", o.sets, "parameter override key=value (repeatable)");
  c->add_option("--seed", o.seed, "base seed")->each([&o](const std::string&) { o.has_seed = true; });
  c->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

json parse_scalar(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::parse_error&) {
    return s;
  }
}

qo::ScenarioConfig make_config(const Common& o) {
  qo::ScenarioConfig cfg;
  if (!o.config.empty()) cfg = qo::load_config(o.config);
  if (!o.scenario.empty()) {
    if (!cfg.scenario.empty() && cfg.scenario != o.scenario)
      throw qo::ConfigError("scenario: command line names '" + o.scenario + "' but the config names '" +
                            cfg.scenario + "'");
    cfg.scenario = o.scenario;
  }
  if (cfg.scenario.empty()) throw qo::ConfigError("scenario: no scenario given");
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw qo::ConfigError("--set: expected key=value, got '" + kv + "'");
    cfg.params[kv.substr(0, eq)] = parse_scalar(kv.substr(eq + 1));
  }
  if (o.has_seed) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.out_path = o.out;
  if (!o.format.empty()) cfg.format = o.format;
  return cfg;
}

struct Destination {
  std::optional<std::filesystem::path> path;  // empty: stdout
  std::string format;
};

Destination destination(const qo::ScenarioConfig& cfg) {
  Destination d;
  if (cfg.out_path && *cfg.out_path != "-") {
    d.path = *cfg.out_path;
  } else if (!cfg.out_path) {
    if (const char* dir = std::getenv("QOPTICS_OUT_DIR"); dir && *dir) d.path = std::filesystem::path(dir) / cfg.scenario;
  }
  if (cfg.format) d.format = *cfg.format;
  else if (d.path && d.path->extension() == ".json") d.format = "json";
  else d.format = "csv";
  if (d.path && !d.path->has_extension()) d.path->replace_extension("." + d.format);
  return d;
}

void emit(const Destination& d, const std::function<void(std::ostream&)>& body) {
  if (!d.path) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  if (d.path->has_parent_path()) std::filesystem::create_directories(d.path->parent_path());
  std::ofstream os(*d.path, std::ios::binary);
  if (!os) throw qo::ConfigError("--out: cannot write '" + d.path->string() + "'");
  body(os);
  if (!os) throw std::runtime_error("write failed for '" + d.path->string() + "'");
}

void write_artifact(const qo::SeriesArtifact& a, const Destination& d) {
  emit(d, [&](std::ostream& os) {
    if (d.format == "json") qo::write_json(qo::artifact_to_json(a), os);
    else qo::write_csv(a, os);
  });
  if (a.grid && d.path) {
    std::filesystem::path side = *d.path;
    side.replace_extension(".dat");
    std::ofstream os(side, std::ios::binary);
    qo::write_gnuplot_matrix(*a.grid, os);
  }
}

// Long format: sweep_index and the swept value prepended to every row.
void write_sweep_csv(const std::vector<qo::SeriesArtifact>& runs, const std::string& param, std::ostream& os) {
  bool header = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    qo::SeriesArtifact a = runs[i];
    const json v = a.metadata.at("params").at(param);
    std::vector<double> idx(a.rows(), static_cast<double>(i));
    std::ostringstream body;
    qo::write_csv(a, body);
    std::istringstream lines(body.str());
    std::string line;
    std::getline(lines, line);
    if (!header) {
      os << "sweep_index," << param << ',' << line << '\n';
      header = true;
    }
    const std::string vs = v.is_number_float() ? qo::format_double(v.get<double>()) : v.is_string() ? v.get<std::string>() : v.dump();
    while (std::getline(lines, line)) os << i << ',' << vs << ',' << line << '\n';
  }
}

int cmd_list() {
  for (const auto& s : qo::registry()) {
    std::cout << s.name << "  " << s.summary << '\n';
    for (const auto& a : s.anchors) std::cout << "    anchor: " << a << '\n';
    for (const auto& p : s.params) {
      std::cout << "    param " << p.name << " = " << p.default_value.dump();
      if (!p.help.empty()) std::cout << "  (" << p.help << ')';
      std::cout << '\n';
    }
  }
  return 0;
}

int cmd_run(const Common& o) {
  const qo::ScenarioConfig cfg = make_config(o);
  write_artifact(qo::run_scenario(cfg, o.threads), destination(cfg));
  return 0;
}

int cmd_sweep(const Common& o, const std::string& param, const std::string& values) {
  const qo::ScenarioConfig cfg = make_config(o);
  std::vector<json> vals;
  std::stringstream ss(values);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) vals.push_back(parse_scalar(item));
  const auto runs = qo::sweep(cfg, param, vals, o.threads);
  emit(destination(cfg), [&](std::ostream& os) {
    if (destination(cfg).format == "json") {
      json arr = json::array();
      for (const auto& a : runs) arr.push_back(qo::artifact_to_json(a));
      qo::write_json(arr, os);
    } else {
      write_sweep_csv(runs, param, os);
    }
  });
  return 0;
}

int cmd_physical(double T, double L, double P, double omega_c, double phase) {
  const qo::PhysicalParams pp = qo::physical_params(T, L, P, omega_c, phase);
  qo::write_json({{"gamma", pp.gamma}, {"E_re", pp.E.real()}, {"E_im", pp.E.imag()}, {"E_abs", std::abs(pp.E)}},
                 std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qoptics: quantum optics scenarios and data export"};
  app.require_subcommand(1);
  Common run_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "run one scenario");
  add_common(run, run_opts);
  auto* list = app.add_subcommand("list", "list scenarios, anchors and parameters");
  auto* sw = app.add_subcommand("sweep", "run a scenario over a list of parameter values");
  add_common(sw, sweep_opts);
  std::string param, values;
  sw->add_option("--param", param, "parameter to vary")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  auto* phys = app.add_subcommand("physical", "cavity decay rate and drive amplitude from SI quantities");
  double T = 0, L = 0, P = 0, omega_c = 0, phase = 0;
  phys->add_option("--T", T, "mirror transmissivity")->required();
  phys->add_option("--L", L, "cavity length [m]")->required();
  phys->add_option("--P", P, "injected power [W]")->required();
  phys->add_option("--omega-c", omega_c, "cavity angular frequency [1/s]")->required();
  phys->add_option("--phase", phase, "drive phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*list) return cmd_list();
    if (*run) return cmd_run(run_opts);
    if (*sw) return cmd_sweep(sweep_opts, param, values);
    if (*phys) return cmd_physical(T, L, P, omega_c, phase);
  } catch (const qo::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qo::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 4;
}
