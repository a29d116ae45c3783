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

#include "qoptics/operator_core.hpp"

namespace qo {

// Quadratures X = a + a^dag, P = i(a^dag - a): [X, P] = 2i, vacuum variance 1.

struct PhaseGrid {
  double x_min = -1, x_max = 1, p_min = -1, p_max = 1;
  int nx = 2, np = 2;

  static PhaseGrid square(double half_width, int n);
  static PhaseGrid default_for(int n_max);  // +-(2 sqrt(n_max) + 4), 257 points
  void validate() const;
  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
  RVec xs() const { return RVec::LinSpaced(nx, x_min, x_max); }
  RVec ps() const { return RVec::LinSpaced(np, p_min, p_max); }
  bool operator==(const PhaseGrid&) const = default;
};

struct WignerGrid {
  PhaseGrid grid;
  RMat values;  // values(ix, ip)
};

struct GaussianState {
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  Eigen::Matrix2d V = Eigen::Matrix2d::Identity();

  // Enforces V = V^T, V > 0 and det V >= 1 - tol.gauss.
  static GaussianState checked(const Eigen::Vector2d& d, const Eigen::Matrix2d& V, const Tolerances& tol = {});
  static GaussianState vacuum() { return {}; }
};

struct SymplecticMap {
  Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
  Eigen::Vector2d a = Eigen::Vector2d::Zero();

  static SymplecticMap checked(const Eigen::Matrix2d& S, const Eigen::Vector2d& a, const Tolerances& tol = {});
};

// R(theta) = [[c, s], [-s, c]] maps (x, p) to (X^theta, X^{theta + pi/2}).
Eigen::Matrix2d rotation_matrix(double theta);
SymplecticMap displacement_map(cplx alpha);
SymplecticMap rotation_map(double theta);
SymplecticMap squeeze_map(cplx z);  // R^T(theta/2) diag(e^-r, e^r) R(theta/2)

double laguerre(int n, double s);
double wigner_fock(int n, double x, double p);
double wigner_gaussian(const GaussianState& g, double x, double p);

// psi_n(x) for n = 0..n_max at every x, as an (n_max+1) x size(x) matrix.
RMat fock_wavefunctions(int n_max, const RVec& x);

// Midpoint-integral Wigner function of a single-mode density matrix. Throws InvalidArgument
// when the grid cannot resolve the highest populated Fock level.
WignerGrid wigner_numeric(const DensityMatrix& rho, const PhaseGrid& grid);
WignerGrid wigner_gaussian_grid(const GaussianState& g, const PhaseGrid& grid);

struct Marginal {
  RVec coord;
  RVec values;
};
enum class Axis { X, P };
// Marginal along `axis` (the other quadrature integrated out by the trapezoid rule).
Marginal marginal(const WignerGrid& w, Axis axis);

double integrate(const WignerGrid& w);
double overlap_wigner(const WignerGrid& w1, const WignerGrid& w2);
// Symmetrically ordered phase-space moment  int W x^m p^n.
double phase_space_moment(const WignerGrid& w, int m, int n);

// Sum over pairings of V entries; idx entries are 0 (x) or 1 (p).
double gaussian_moment(const Eigen::Matrix2d& V, const std::vector<int>& idx);

GaussianState symplectic_apply(const SymplecticMap& m, const GaussianState& g, const Tolerances& tol = {});
GaussianState gaussian_from_complex_moments(cplx mean_a, cplx var_a, double n_fluct, const Tolerances& tol = {});
// Mean vector and covariance read off a single-mode state.
GaussianState gaussian_from_state(const DensityMatrix& rho, const Tolerances& tol = {});

}  // namespace qo
