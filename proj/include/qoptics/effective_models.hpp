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

#include <vector>

#include "qoptics/open_dynamics.hpp"

namespace qo {

struct ProjectorPair {
  Operator P;
  static ProjectorPair checked(const Operator& P, const Tolerances& tol = {});
  Operator Q() const { return Operator::identity(P.basis) - P; }
};

struct EffectiveHamiltonian {
  Operator H_eff;        // P H0 P plus the Hermitian part of the secular second-order term
  Operator H_eff_t;      // same with the oscillating terms evaluated at t_horizon
  double hermiticity_residual;  // ||H_eff - H_eff^dag|| + 2 ||tail||
  double time_dependent_tail;   // bound on the modulus of the dropped oscillating terms
  bool auto_split;              // P H1 P was moved into H0
};

// P H0 P + (1/i) int_0^t P H1 e^{-i H0 tau} H1 e^{i H0 tau} P dtau, evaluated in the H0 eigenbasis.
EffectiveHamiltonian effective_hamiltonian_2nd(const Operator& H0, const Operator& H1, const ProjectorPair& P,
                                               double t_horizon, const Tolerances& tol = {});

// amplitude e^{-rate tau}, Re rate > 0.
struct ExpTerm {
  cplx amplitude;
  cplx rate;
};
using Correlator = std::vector<ExpTerm>;

// H1 = sum_m g_m S_m (x) E_m; C[m][n] = <E_m(t) E_n(t+tau)>, K[n][m] = <E_n(t+tau) E_m(t)>.
struct Elimination {
  LindbladModel system;   // L_S
  Operator H_slow;        // H_S used for the tau dependence of S_m
  std::vector<cplx> g;
  std::vector<Operator> S;
  std::vector<std::vector<Correlator>> C, K;
};

struct EffectiveMaster {
  LindbladModel model;
  Superoperator liouvillian;
  double min_correlator_rate;
  double max_effective_rate;
  double max_coupling;
  Report consistency;
};

EffectiveMaster effective_master_2nd(const Elimination& e, const Tolerances& tol = {});

// Lindblad form of a GKSL superoperator (column stacking); rates in the 2 J rho J^dag convention.
LindbladModel lindblad_from_superoperator(const Superoperator& L, const BasisSpec& basis, Report* report = nullptr);

struct PurcellRates {
  double Gamma_minus, Gamma_plus;
  double Gamma_eff, nbar_eff;
  double delta_eps;
  double C;
};
PurcellRates purcell_rates(double g, double kappa, double gamma, double Delta, double nbar);

// Cavity vacuum correlators for the Purcell problem: C12 = e^{-(kappa - i Delta) tau}, K12 = e^{-(kappa + i Delta) tau}.
Elimination purcell_elimination(double g, double kappa, double gamma, double Delta, double nbar);
// Atom-cavity model on Fock(n_max) x TwoLevel in the frame rotating at the atomic frequency.
LindbladModel purcell_full_model(double g, double kappa, double gamma, double Delta, double nbar, int n_max);
// (delta_eps/2) sz with sigma at Gamma_minus and sigma^dag at Gamma_plus.
LindbladModel purcell_effective_model(const PurcellRates& r);

struct OptomechRates {
  double Gamma_minus_opt, Gamma_plus_opt;
  double dOmega_minus, dOmega_plus;
  double Gamma_eff, nbar_eff;
  double Omega_eff;
  double C;
  double floor;  // kappa^2 / (4 Omega^2)
};
OptomechRates optomech_rates(double g, double kappa, double gamma, double Delta, double Omega_m, double nbar);

struct WWResult {
  std::vector<double> t;
  std::vector<double> k;
  std::vector<double> alpha;  // e^{-gamma t}
  CMat beta;                  // k x t, k > 0 branch (the k < 0 branch is identical)
  std::vector<double> norm;   // 2 int |beta|^2 over the branch, analytic Lorentzian tails added
  double max_norm_error;      // against 1 - e^{-2 gamma t}
};

// k > 0 grid with uniform spacing 0.002 gamma/c within 100 gamma/c of resonance, geometric out to 1e7 gamma/c.
std::vector<double> ww_default_k_grid(double gamma, double epsilon, double c = 1.0);
WWResult wigner_weisskopf(double gamma, double epsilon, const std::vector<double>& k_grid,
                          const std::vector<double>& t_grid, double c = 1.0);

// -(gamma/pi) ln(Lambda/epsilon).
double lamb_shift_estimate(double gamma, double epsilon, double Lambda);

}  // namespace qo
