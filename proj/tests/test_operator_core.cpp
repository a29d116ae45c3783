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

#include "qoptics/operator_core.hpp"

using namespace qo;

TEST_CASE("ladder operators obey the truncated commutator") {
  const FockOps f = fock_ops(6);
  const CMat c = commutator(f.a, f.a_dag).m;
  for (int n = 0; n < 6; ++n) CHECK(std::abs(c(n, n) - 1.0) < 1e-14);
  CHECK(std::abs(c(6, 6) + 6.0) < 1e-14);
  CHECK((f.a_dag * f.a - f.N).m.norm() < 1e-14);
  CHECK((f.X.m - f.X.m.adjoint()).norm() < 1e-14);
  CHECK((f.P.m - f.P.m.adjoint()).norm() < 1e-14);
}

TEST_CASE("pauli operators use the excited-first ordering") {
  const PauliOps s = pauli_ops();
  CHECK(s.sm.m(1, 0) == cplx(1));
  CHECK(s.sz.m(0, 0) == cplx(1));
  CHECK((commutator(s.sp, s.sm) - s.sz).m.norm() < 1e-14);
  CHECK((commutator(s.sx, s.sy) - cplx(0, 2) * s.sz).m.norm() < 1e-14);
}

TEST_CASE("tensor_embed places factors in kron order") {
  const BasisSpec b = BasisSpec::product({Factor::fock(3), Factor::two_level()});
  CHECK(b.total_dim() == 8);
  const Operator a = tensor_embed(fock_ops(3).a, 0, b);
  const Operator sm = tensor_embed(pauli_ops().sm, 1, b);
  CHECK(commutator(a, sm).m.norm() < 1e-14);
  CHECK(std::abs(a.m(0, 2) - 1.0) < 1e-14);  // |0,e> <- |1,e>
  CHECK_THROWS_AS(tensor_embed(fock_ops(2).a, 0, b), InvalidArgument);
  CHECK_THROWS_AS(tensor_embed(pauli_ops().sm, 2, b), InvalidArgument);
}

TEST_CASE("coherent state moments") {
  const cplx alpha(1.2, -0.7);
  const int n_max = default_cutoff_coherent(alpha);
  const KetState k = coherent_state(alpha, n_max);
  const FockOps f = fock_ops(n_max);
  CHECK(std::abs(expectation(f.a, k) - alpha) < 1e-10);
  CHECK(std::abs(expectation(f.N, k).real() - std::norm(alpha)) < 1e-10);
  CHECK(std::abs(variance(f.X, k) - 1.0) < 1e-10);
  CHECK(k.leakage < 1e-12);
}

TEST_CASE("displacement operator reproduces the coherent amplitudes") {
  const cplx alpha(0.8, 0.3);
  const int n_max = default_cutoff_coherent(alpha) + 10;
  Report rep;
  const Operator D = displacement_op(alpha, n_max, &rep);
  const CVec col = D.m.col(0);
  CHECK((col - coherent_state(alpha, n_max).amp).norm() < 1e-10);
  CHECK(rep.warnings.empty());
  Report small;
  displacement_op(cplx(3.0, 0.0), 6, &small);
  CHECK(!small.warnings.empty());
}

TEST_CASE("squeezed vacuum quadrature variances") {
  const double r = 0.6;
  const int n_max = default_cutoff_squeezed(r);
  const FockOps f = fock_ops(n_max);
  const KetState k = squeezed_vacuum(r, n_max);
  CHECK(std::abs(variance(f.X, k) - std::exp(-2 * r)) < 1e-9);
  CHECK(std::abs(variance(f.P, k) - std::exp(2 * r)) < 1e-9);
  const KetState kp = squeezed_vacuum(std::polar(r, kPi), n_max);
  CHECK(std::abs(variance(f.X, kp) - std::exp(2 * r)) < 1e-9);
  const Operator S = squeeze_op(r, n_max);
  CHECK((S.m.col(0) - k.amp).norm() < 1e-8);
}

TEST_CASE("thermal state mean and leakage") {
  const DensityMatrix t = thermal_state(0.5, 40);
  CHECK(std::abs(expectation(fock_ops(40).N, t).real() - 0.5) < 1e-12);
  CHECK(std::abs(thermal_state(2.0, 5).leakage - std::pow(2.0 / 3.0, 6)) < 1e-12);
  CHECK_THROWS_AS(thermal_state(-1.0, 5), InvalidArgument);
}

TEST_CASE("density matrix validation") {
  CMat bad(2, 2);
  bad << 0.5, 0.3, 0.0, 0.5;
  CHECK_THROWS_AS(DensityMatrix::checked(BasisSpec::two_level(), bad), InvalidArgument);
  CMat neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix::checked(BasisSpec::two_level(), neg), InvalidArgument);
  CMat half = CMat::Identity(2, 2) * 0.5;
  CHECK_NOTHROW(DensityMatrix::checked(BasisSpec::two_level(), half));
  CHECK(density_violation(neg, {}).has_value());
}

TEST_CASE("partial trace of a product state") {
  const BasisSpec b = BasisSpec::product({Factor::fock(2), Factor::two_level()});
  CMat f = CMat::Zero(3, 3);
  f(1, 1) = 0.7;
  f(2, 2) = 0.3;
  CMat q(2, 2);
  q << 0.25, cplx(0, 0.1), cplx(0, -0.1), 0.75;
  const DensityMatrix r = DensityMatrix::checked(b, kron(f, q));
  CHECK((partial_trace(r, {1}).rho - q).norm() < 1e-14);
  CHECK((partial_trace(r, {0}).rho - f).norm() < 1e-14);
  CHECK_THROWS_AS(partial_trace(r, {2}), InvalidArgument);
}

TEST_CASE("spectral propagator matches the matrix exponential") {
  const FockOps f = fock_ops(8);
  const Operator H = f.N + 0.3 * (f.a + f.a_dag);
  const SpectralPropagator U(H);
  const CMat e = propagator(H, 1.7).m;
  CHECK((U.at(1.7) - e).norm() < 1e-10);
  CHECK(((U.at(0.4).adjoint() * U.at(0.4)) - CMat::Identity(9, 9)).norm() < 1e-12);
}

TEST_CASE("global phase and trace distance") {
  CVec v(2);
  v << cplx(0, 1), cplx(0, 1);
  fix_global_phase(v);
  CHECK(std::abs(v(0).imag()) < 1e-15);
  CHECK(v(0).real() > 0);
  const CMat e = fock_state(0, 1).amp * fock_state(0, 1).amp.adjoint();
  const CMat g = fock_state(1, 1).amp * fock_state(1, 1).amp.adjoint();
  CHECK(std::abs(trace_distance(e, g) - 1.0) < 1e-14);
  CHECK(trace_distance(e, e) < 1e-14);
}
