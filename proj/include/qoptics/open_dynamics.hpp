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
#include <vector>

#include "qoptics/operator_core.hpp"

namespace qo {

// Dissipator convention: kappa (2 J rho J^dag - J^dag J rho - rho J^dag J).
struct Jump {
  double kappa;
  Operator J;
};

// H_d(t) = i (amplitude e^{-i nu t} op - amplitude^* e^{i nu t} op^dag).
struct Drive {
  Operator op;
  cplx amplitude;
  double frequency;
};

struct LindbladModel {
  BasisSpec basis;
  Operator H;
  std::vector<Jump> jumps;
  std::vector<Drive> drives;

  void validate(const Tolerances& tol = {}) const;
  bool time_dependent() const;
  // H plus every zero-frequency drive; InvalidArgument if a rotating drive remains.
  Operator static_hamiltonian() const;
  CMat hamiltonian_at(double t) const;
};

// Column-stacked: vec(rho)[i + j d] = rho(i, j).
struct Superoperator {
  CMat L;
  int dim;  // Hilbert-space dimension
};

Superoperator build_liouvillian(const LindbladModel& m, const Tolerances& tol = {});
// L[rho] evaluated directly at time t.
CMat apply_lindblad(const LindbladModel& m, const CMat& rho, double t = 0.0);
// Heisenberg-picture generator L^dag[A] = i[H, A] + sum kappa (2 J^dag A J - J^dag J A - A J^dag J).
Operator adjoint_lindblad(const LindbladModel& m, const Operator& A);

enum class PropagationMethod { MatrixExponential, AdaptiveOde };

struct MasterSeries {
  std::vector<double> t;
  std::vector<DensityMatrix> rho;
  PropagationMethod method;
};

MasterSeries evolve_master(const DensityMatrix& rho0, const LindbladModel& m, const std::vector<double>& t_grid,
                           const Settings& s = default_settings(), Report* report = nullptr);
// Generic propagation of an arbitrary operator Y (not necessarily a state), no validation.
std::vector<CMat> propagate_operator(const CMat& Y0, const LindbladModel& m, const std::vector<double>& t_grid,
                                     const Settings& s = default_settings());

DensityMatrix steady_state(const LindbladModel& m, const Settings& s = default_settings());

// <[A,H]/i> + sum kappa (<[J^dag, A] J> + <J^dag [A, J]>) on the supplied state.
cplx moment_rhs(const Operator& A, const LindbladModel& m, const DensityMatrix& state);

LindbladModel frame_transform(const LindbladModel& m, const Operator& generator, double frequency,
                              const Tolerances& tol = {});

struct CavityParams {
  double omega_c = 0;
  double gamma = 1;
  double Delta = 0;  // omega_L - omega_c
  cplx E = 0;
  double nbar = 0;
  void validate() const;
};

// Rotating frame at omega_L: H = -Delta a^dag a + i(E a^dag - E^* a); jumps a at gamma(nbar+1), a^dag at gamma nbar.
LindbladModel cavity_model(const CavityParams& p, int n_max);
// Lab frame: H = omega_c a^dag a with the drive rotating at omega_L = omega_c + Delta.
LindbladModel cavity_model_lab(const CavityParams& p, int n_max);

struct CavityMoments {
  cplx mean_a;   // <a>
  cplx var_a;    // <da^2>
  double n_fluct;  // <da^dag da>
};
CavityMoments driven_cavity_analytic(const CavityParams& p, const CavityMoments& init, double t);
cplx driven_cavity_steady_mean(const CavityParams& p);

// (epsilon/2) sz with sigma at gamma(nbar+1) and sigma^dag at gamma nbar.
LindbladModel atom_model(double gamma, double nbar = 0, double epsilon = 0);
// Coherences decay as e^{-gamma_phi t / 2}: jump sz with kappa = gamma_phi / 8.
LindbladModel dephasing_model(double gamma_phi, double epsilon = 0);

struct McwfOptions {
  double dt = 0;        // 0: automatic
  double p_max = 0.05;  // cap on the per-step jump probability for automatic dt
  int threads = 1;
  int chunk = 64;       // trajectories per RNG stream
  bool keep_records = true;
  std::vector<Operator> observables;
};

struct TrajectoryRecord {
  std::vector<double> jump_times;
  std::vector<int> channels;
};

struct McwfResult {
  std::vector<double> t;
  RMat populations;  // t x basis index, ensemble mean of |psi_i|^2
  CMat observables;  // t x observable, ensemble mean
  std::vector<TrajectoryRecord> bundle;
  double dt;
  double p_bound;  // upper bound of the per-step jump probability
};

McwfResult mcwf_evolve(const KetState& psi0, const LindbladModel& m, const std::vector<double>& t_grid, int n_traj,
                       std::uint64_t seed, const McwfOptions& opt = {});

std::uint64_t splitmix64(std::uint64_t x);

// d v/dt = A v + drive + noise, v = (a_1..a_n, a_1^dag..a_n^dag), <xi(t) xi^T(t')> = D delta(t-t').
struct LangevinLinearModel {
  CMat A;
  CMat D;
  CVec drive;
};

struct LangevinSteady {
  CVec mean;
  CMat M;  // <dv dv^T>
};

LangevinSteady langevin_steady(const LangevinLinearModel& m);
LangevinLinearModel cavity_langevin(const CavityParams& p);
// Degenerate OPO below threshold: H = Delta a^dag a + i(g/2)(a^dag^2 - a^2), decay gamma.
LangevinLinearModel opo_langevin(double gamma, double g, double Delta = 0, double nbar = 0);
LindbladModel opo_model(double gamma, double g, int n_max, double Delta = 0);

}  // namespace qo
