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

#include "qoptics/effective_models.hpp"

using namespace qo;

namespace {

Operator ket_bra(const BasisSpec& b, int i, int j) {
  CMat m = CMat::Zero(b.total_dim(), b.total_dim());
  m(i, j) = 1;
  return {b, m};
}

std::vector<double> grid(double t_max, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(t_max * i / (n - 1));
  return t;
}

// Least-squares slope of the unwrapped phase of <psi0|psi(t)>.
double phase_rate(const std::vector<double>& t, const std::vector<cplx>& ov) {
  std::vector<double> ph;
  double prev = 0, off = 0;
  for (std::size_t i = 0; i < ov.size(); ++i) {
    double a = std::arg(ov[i]);
    if (i > 0) {
      while (a + off - prev > kPi) off -= 2 * kPi;
      while (a + off - prev < -kPi) off += 2 * kPi;
    }
    prev = a + off;
    ph.push_back(prev);
  }
  const double n = static_cast<double>(t.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sx += t[i];
    sy += ph[i];
    sxx += t[i] * t[i];
    sxy += t[i] * ph[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("light shift of a far-detuned two-level atom") {
  const BasisSpec b = BasisSpec::two_level();
  const double Om = 1.0;
  auto run = [&](double D) {
    const Operator H0 = (-D) * ket_bra(b, 0, 0);
    const Operator H1 = (0.5 * Om) * pauli_ops().sx;
    return effective_hamiltonian_2nd(H0, H1, ProjectorPair::checked(ket_bra(b, 1, 1)), 1.0);
  };
  const double D = 20;
  const EffectiveHamiltonian e = run(D);
  const double exact = 0.5 * (-D + std::sqrt(D * D + Om * Om));
  CHECK(std::abs(e.H_eff.m(1, 1).real() - Om * Om / (4 * D)) < 1e-15);
  CHECK(std::abs(e.H_eff.m(1, 1).real() - exact) < Om * Om * Om * Om / (8 * D * D * D));
  CHECK(run(2 * D).hermiticity_residual <= 0.6 * e.hermiticity_residual);
  CHECK(!e.auto_split);
}

TEST_CASE("Raman coupling between two ground states") {
  const BasisSpec b = BasisSpec::fock(2);  // |1>, |2> ground, |3> excited
  const double D = 50, O1 = 1.0, O2 = 0.6;
  const Operator H0 = D * ket_bra(b, 2, 2);
  const Operator H1 = (0.5 * O1) * (ket_bra(b, 2, 0) + ket_bra(b, 0, 2)) + (0.5 * O2) * (ket_bra(b, 2, 1) + ket_bra(b, 1, 2));
  const EffectiveHamiltonian e =
      effective_hamiltonian_2nd(H0, H1, ProjectorPair::checked(ket_bra(b, 0, 0) + ket_bra(b, 1, 1)), 1.0);
  CHECK(std::abs(e.H_eff.m(0, 1) + O1 * O2 / (4 * D)) < 1e-14);
  CHECK(std::abs(e.H_eff.m(0, 0) + O1 * O1 / (4 * D)) < 1e-14);
  CHECK(std::abs(e.H_eff.m(1, 1) + O2 * O2 / (4 * D)) < 1e-14);
}

TEST_CASE("effective Hamiltonian checks its inputs") {
  const BasisSpec b = BasisSpec::two_level();
  CHECK_THROWS_AS(ProjectorPair::checked(0.5 * Operator::identity(b)), InvalidArgument);
  const Operator H0 = pauli_ops().sx;
  CHECK_THROWS_AS(effective_hamiltonian_2nd(H0, pauli_ops().sz, ProjectorPair::checked(ket_bra(b, 1, 1)), 1.0),
                  InvalidArgument);
  const Operator deg = Operator::zero(b);
  CHECK_THROWS_AS(effective_hamiltonian_2nd(deg, pauli_ops().sx, ProjectorPair::checked(ket_bra(b, 1, 1)), 1.0),
                  NumericError);
}

TEST_CASE("optical potential reproduces the ground-manifold phase") {
  const int nx = 32;
  const BasisSpec b = BasisSpec::product({Factor::fock(nx - 1), Factor::two_level()});
  const double Om0 = 1.0, J = 0.001;
  CMat T = CMat::Zero(nx, nx), Wx = CMat::Zero(nx, nx);
  for (int x = 0; x < nx; ++x) {
    T(x, (x + 1) % nx) = T((x + 1) % nx, x) = -J;
    Wx(x, x) = 0.5 * Om0 * (1 + 0.3 * std::cos(2 * kPi * x / nx));
  }
  CVec phi0(nx);
  for (int x = 0; x < nx; ++x) phi0(x) = std::exp(-0.5 * std::pow((x - 10.0) / 3.0, 2));
  phi0.normalize();
  const CVec psi0 = kron(phi0, CVec::Unit(2, 1));
  const std::vector<double> t = grid(1.0 / Om0, 201);
  for (double D : {50.0, -80.0}) {
    const Operator H0{b, kron(T, CMat::Identity(2, 2)) + kron(CMat::Identity(nx, nx), (-D) * ket_bra(BasisSpec::two_level(), 0, 0).m)};
    const Operator H1{b, kron(Wx, pauli_ops().sx.m)};
    const Operator P{b, kron(CMat::Identity(nx, nx), ket_bra(BasisSpec::two_level(), 1, 1).m)};
    const EffectiveHamiltonian e = effective_hamiltonian_2nd(H0, H1, ProjectorPair::checked(P), t.back());
    const SpectralPropagator full(H0 + H1), eff(e.H_eff);
    std::vector<cplx> of, oe;
    for (double x : t) {
      of.push_back(psi0.dot(full.apply(psi0, x)));
      oe.push_back(psi0.dot(eff.apply(psi0, x)));
    }
    const double rf = phase_rate(t, of), re = phase_rate(t, oe);
    CHECK(std::abs(re / rf - 1) < 0.01);
  }
}

TEST_CASE("GKSL decomposition round trip") {
  const LindbladModel m = atom_model(0.7, 0.4, 1.3);
  const Superoperator L = build_liouvillian(m);
  Report rep;
  const LindbladModel back = lindblad_from_superoperator(L, m.basis, &rep);
  CHECK((build_liouvillian(back).L - L.L).norm() < 1e-10);
  CHECK(rep.warnings.empty());
  CavityParams p;
  p.gamma = 0.3;
  p.Delta = 0.2;
  p.nbar = 0.5;
  const LindbladModel c = cavity_model(p, 4);
  CHECK((build_liouvillian(lindblad_from_superoperator(build_liouvillian(c), c.basis)).L - build_liouvillian(c).L).norm() <
        1e-10);
}

TEST_CASE("Purcell rates agree with the assembled effective master equation") {
  for (double D : {0.0, 300.0, -1000.0}) {
    const double g = 10, kappa = 1000, gamma = 1, nbar = 1;
    const EffectiveMaster e = effective_master_2nd(purcell_elimination(g, kappa, gamma, D, nbar));
    const PurcellRates r = purcell_rates(g, kappa, gamma, D, nbar);
    const Superoperator ref = build_liouvillian(purcell_effective_model(r));
    CHECK((e.liouvillian.L - ref.L).norm() < 1e-12 * ref.L.norm());
    CHECK(std::abs(r.Gamma_minus - r.Gamma_plus - r.Gamma_eff) < 1e-12);
    CHECK(std::abs(r.nbar_eff - r.Gamma_plus / r.Gamma_eff) < 1e-15);
  }
  const EffectiveMaster zero = effective_master_2nd(purcell_elimination(0, 10, 1, 0, 0.5));
  CHECK((zero.liouvillian.L - build_liouvillian(atom_model(1, 0.5)).L).norm() < 1e-14);
}

TEST_CASE("Purcell level shift matches the full atom-cavity model") {
  const double gamma = 1, g = 10, kappa = 1000, D = 1000, nbar = 0;
  const int n_max = 3;
  const LindbladModel full = purcell_full_model(g, kappa, gamma, D, nbar, n_max);
  const PurcellRates r = purcell_rates(g, kappa, gamma, D, nbar);
  const LindbladModel eff = purcell_effective_model(r);
  CMat atom = CMat::Constant(2, 2, 0.5);
  const CMat vac = fock_state(0, n_max).amp * fock_state(0, n_max).amp.adjoint();
  const auto t = grid(3, 16);
  const MasterSeries a = evolve_master(DensityMatrix::checked(full.basis, kron(vac, atom)), full, t);
  const MasterSeries e = evolve_master(DensityMatrix::checked(BasisSpec::two_level(), atom), eff, t);
  double worst = 0, phase_err = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const DensityMatrix red = partial_trace(a.rho[i], {1});
    worst = std::max(worst, trace_distance(red.rho, e.rho[i].rho));
    phase_err = std::max(phase_err, std::abs(std::arg(red.rho(0, 1) / e.rho[i].rho(0, 1))));
  }
  CHECK(worst < 0.01);
  CHECK(phase_err < 0.2 * std::abs(r.delta_eps) * t.back());
}

TEST_CASE("Wigner-Weisskopf norm identity on the default grid") {
  const double gamma = 1, eps = 200;
  const WWResult w = wigner_weisskopf(gamma, eps, ww_default_k_grid(gamma, eps), {0.0, 0.2, 0.5, 1.0, 2.0, 4.0});
  CHECK(w.max_norm_error <= 1e-6);
  for (std::size_t i = 0; i < w.t.size(); ++i) CHECK(std::abs(w.alpha[i] - std::exp(-gamma * w.t[i])) < 1e-15);
}

TEST_CASE("Lamb shift estimate") {
  const double ratio = -lamb_shift_estimate(1.0, 13.0, 1e6);
  CHECK(std::abs(ratio - 3.58) <= 0.01);
  CHECK_THROWS_AS(lamb_shift_estimate(1.0, 13.0, 1.0), InvalidArgument);
}

TEST_CASE("optomechanical sideband cooling") {
  const double kappa = 1, Om = 20;
  const OptomechRates r = optomech_rates(0.1, kappa, 1e-12, -Om, Om, 0);
  CHECK(r.floor == doctest::Approx(kappa * kappa / (4 * Om * Om)));
  CHECK(std::abs(r.nbar_eff / r.floor - 1) < 0.01);
  const OptomechRates bare = optomech_rates(0, kappa, 0.01, -Om, Om, 5);
  CHECK(bare.Gamma_eff == doctest::Approx(0.01));
  CHECK(bare.nbar_eff == doctest::Approx(5));
  const OptomechRates side = optomech_rates(0.3, kappa, 1e-4, -Om, Om, 100);
  CHECK(side.Gamma_eff == doctest::Approx(1e-4 * side.C).epsilon(0.01));
  CHECK_THROWS_AS(optomech_rates(0.3, kappa, 1e-4, Om, Om, 100), NumericError);
}
