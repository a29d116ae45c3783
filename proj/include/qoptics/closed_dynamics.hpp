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

#include <functional>
#include <vector>

#include "qoptics/ode.hpp"
#include "qoptics/operator_core.hpp"

namespace qo {

// b = (<sx>, <sy>, <sz>); complex coherence <sigma> = (bx - i by)/2.
using BlochVector = Eigen::Vector3d;

BlochVector bloch_from_density(const CMat& rho2);
CMat density_from_bloch(const BlochVector& b);

struct RabiParams {
  double epsilon = 1;  // transition frequency
  double omega = 1;    // drive frequency
  double Omega = 0;    // drive strength
  double Delta() const { return omega - epsilon; }
};

struct JCParams {
  double omega = 1;    // cavity
  double epsilon = 1;  // atom
  double g = 0;
  double Delta() const { return omega - epsilon; }
};

struct PDCParams {
  double Delta = 1;  // omega_0 - omega_2/2
  double g = 0;
};

// db/dt = alpha(t) x b, the Bloch form of H = alpha(t).sigma/2.
std::vector<BlochVector> integrate_bloch(const BlochVector& b0,
                                         const std::function<Eigen::Vector3d(double)>& alpha,
                                         const std::vector<double>& t_grid, const OdeOptions& opt = {});

// alpha(t) of the semiclassical Rabi Hamiltonian  Omega cos(omega t) sx + (epsilon/2) sz.
std::function<Eigen::Vector3d(double)> rabi_drive(const RabiParams& p);

struct RabiSolution {
  BlochVector slow;  // rotating at the drive frequency: (Re, -Im) of 2 b~, and bz
  BlochVector lab;
  cplx b_slow;
  cplx b_lab;
};

// Rotating-wave solution: the slow Bloch vector precesses about (Omega, 0, -Delta) at Omega_R.
RabiSolution rabi_rwa(const BlochVector& b0, double Delta, double Omega, double omega, double t);
double rabi_excited_population(double Delta, double Omega, double t);  // ground start

struct DressedLevels {
  double E_plus, E_minus, theta, Omega_n;
  CVec v_plus, v_minus;  // in (|n,g>, |n-1,e>)
};
DressedLevels jc_dressed(int n, const JCParams& p);

// omega a^dag a + (epsilon/2) sz + i g (a sigma^dag - a^dag sigma) on Fock(n_max) x TwoLevel.
Operator jc_hamiltonian(const JCParams& p, int n_max);

double jc_excited_population(const CVec& cn, const JCParams& p, double t);

struct PoissonWindow {
  int n_lo, n_hi;
  RVec weights;  // P(n) for n_lo..n_hi
  double tail;
};
PoissonWindow poisson_window(double nbar);

struct CollapseRevival {
  std::vector<double> t;
  std::vector<double> series;       // exact sum
  std::vector<double> envelope;     // Gaussian approximation
  double gamma_c;                   // g / sqrt 2
  std::vector<double> t_revivals;   // pi m sqrt(nbar) / g inside the grid
  std::vector<double> t_revivals_measured;  // centroids of envelope bumps of the exact series
};
CollapseRevival collapse_revival(double nbar, double g, const std::vector<double>& t_grid);
double collapse_revival_exact(const PoissonWindow& w, double g, double t);
// Centroids of |p_e - 1/2|^2 bumps after the initial collapse, on a fine internal grid up to t_max.
std::vector<double> measure_revivals(double nbar, double g, double t_max);
// Slope fit of log peak amplitude vs t^2 over peaks of |series - 1/2| with t <= t_fit.
double fit_collapse_rate(double nbar, double g, double t_fit);

enum class PDCPhase { Stable, Unstable, Critical };
struct PDCAnalysis {
  PDCPhase phase;
  double r;
  double rate;  // Omega (stable, signed) or kappa (unstable); 0 at the critical point
};
PDCAnalysis pdc_analysis(const PDCParams& p);
double pdc_photon_number(const PDCParams& p, double t);
// Delta a^dag a - (g/2)(a^dag^2 + a^2).
Operator pdc_hamiltonian(const PDCParams& p, int n_max);

struct LinearSystem {
  CMat B;
  enum class Forcing { None, Constant, Exponential, Function } kind = Forcing::None;
  CVec y;        // Constant: y, Exponential: y e^{mu t}
  cplx mu = 0;
  std::function<CVec(double)> f;  // Function forcing
};

// x(t) = S e^{D t} S^-1 x0 + int_0^t e^{B(t-s)} forcing(s) ds.
std::vector<CVec> solve_linear(const LinearSystem& sys, const CVec& x0, const std::vector<double>& t_grid);

// 3x3 RWA Bloch matrix on (b~, b~^*, bz).
CMat rabi_rwa_matrix(double Delta, double Omega);

}  // namespace qo
