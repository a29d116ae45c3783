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
#include <string>
#include <vector>

#include "qoptics/linalg.hpp"
#include "qoptics/settings.hpp"

namespace qo {

// Truncated Fock factor (levels 0..n_max) or a two-level factor ordered (|e>, |g>).
struct Factor {
  enum class Kind { Fock, TwoLevel };
  Kind kind = Kind::Fock;
  int n_max = 1;

  static Factor fock(int n_max);
  static Factor two_level() { return {Kind::TwoLevel, 1}; }
  int dim() const { return kind == Kind::Fock ? n_max + 1 : 2; }
  bool operator==(const Factor&) const = default;
};

struct BasisSpec {
  std::vector<Factor> factors;

  static BasisSpec fock(int n_max) { return {{Factor::fock(n_max)}}; }
  static BasisSpec two_level() { return {{Factor::two_level()}}; }
  static BasisSpec product(std::vector<Factor> f);
  int total_dim() const;
  std::string describe() const;
  bool operator==(const BasisSpec&) const = default;
};

struct Operator {
  BasisSpec basis;
  CMat m;

  Operator() = default;
  Operator(BasisSpec b, CMat mat);
  static Operator identity(const BasisSpec& b);
  static Operator zero(const BasisSpec& b);
  int dim() const { return static_cast<int>(m.rows()); }
  Operator adjoint() const { return {basis, m.adjoint()}; }
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx s, const Operator& a);
Operator operator*(double s, const Operator& a);
Operator commutator(const Operator& a, const Operator& b);

struct KetState {
  BasisSpec basis;
  CVec amp;
  double leakage = 0.0;  // 1 - sum |c|^2 before renormalization
};

struct DensityMatrix {
  BasisSpec basis;
  CMat rho;
  double leakage = 0.0;

  // Validates Hermiticity, unit trace and positivity; throws InvalidArgument on violation.
  static DensityMatrix checked(BasisSpec b, CMat rho, const Tolerances& tol = {});
  static DensityMatrix from_ket(const KetState& k);
};

// Human-readable violation of the density-matrix invariants, or nullopt.
std::optional<std::string> density_violation(const CMat& rho, const Tolerances& tol);

struct FockOps {
  Operator a, a_dag, N, X, P;
};
FockOps fock_ops(int n_max);

struct PauliOps {
  Operator sx, sy, sz, sm, sp;
};
PauliOps pauli_ops();

Operator tensor_embed(const Operator& op, int slot, const BasisSpec& basis);

// exp(alpha a^dag - alpha^* a) on the truncated space. Warns when the vacuum column departs
// from the exact coherent amplitudes (plus their tail beyond n_max) by more than tol.trunc.
Operator displacement_op(cplx alpha, int n_max, Report* report = nullptr, const Tolerances& tol = {});
// exp((z^*/2) a^2 - (z/2) a^dag^2); same warning rule against the exact squeezed vacuum.
Operator squeeze_op(cplx z, int n_max, Report* report = nullptr, const Tolerances& tol = {});

int default_cutoff_coherent(cplx alpha);
int default_cutoff_squeezed(double r);

KetState fock_state(int n, int n_max);
KetState coherent_state(cplx alpha, int n_max);
KetState squeezed_vacuum(cplx z, int n_max);
DensityMatrix thermal_state(double nbar, int n_max);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

cplx expectation(const Operator& op, const KetState& psi);
cplx expectation(const Operator& op, const DensityMatrix& rho);
double variance(const Operator& op, const KetState& psi, const Tolerances& tol = {});
double variance(const Operator& op, const DensityMatrix& rho, const Tolerances& tol = {});

// exp(-i H t); rejects non-Hermitian H.
Operator propagator(const Operator& H, double t, const Tolerances& tol = {});

// Eigendecomposition of a Hermitian H, reusable for many propagation times.
struct SpectralPropagator {
  BasisSpec basis;
  RVec energies;
  CMat vectors;
  explicit SpectralPropagator(const Operator& H, const Tolerances& tol = {});
  CMat at(double t) const;
  CVec apply(const CVec& psi0, double t) const;
};

// Makes the first amplitude with modulus above cutoff real and positive.
void fix_global_phase(CVec& v, double cutoff = 1e-12);

double trace_distance(const CMat& a, const CMat& b);

}  // namespace qo
