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

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qo {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Bad caller input (maps to CLI exit code 2).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: invariant violated, ill-conditioning, step underflow (exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double norm = 1e-10;
  double herm = 1e-10;
  double trace = 1e-10;
  double psd = 1e-8;
  double unit = 1e-10;
  double trunc = 1e-6;
  double gauss = 1e-9;
  double symp = 1e-10;
  double close = 1e-9;
};

struct Settings {
  Tolerances tol;
  int exp_threshold_dim = 16;  // Hilbert dim at or below which Lindblad propagation uses expm
  double ode_rtol = 1e-10;
  double ode_atol = 1e-12;
  int threads = 1;
};

inline const Settings& default_settings() {
  static const Settings s{};
  return s;
}

// Side channel for non-fatal diagnostics; every op that can warn takes an optional Report*.
struct Report {
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  void warn(std::string w) { warnings.push_back(std::move(w)); }
  void note(std::string n) { notes.push_back(std::move(n)); }
};

inline void warn_if(Report* r, std::string msg) {
  if (r) r->warn(std::move(msg));
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace qo
