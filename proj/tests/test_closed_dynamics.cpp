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

#include "qoptics/closed_dynamics.hpp"

using namespace qo;

namespace {

// Index of |n, e> (e = 0) or |n, g> (g = 1) in Fock x TwoLevel.
int idx(int n, int q) { return 2 * n + q; }

}  // namespace

TEST_CASE("rotating-wave solution reproduces the Rabi formula") {
  for (double D : {0.0, 0.4, -1.3}) {
    for (double t : {0.0, 0.5, 2.0, 7.3}) {
      const RabiSolution s = rabi_rwa(BlochVector(0, 0, -1), D, 1.0, 20.0, t);
      const double W2 = 1.0 + D * D;
      const double ref = std::sin(0.5 * std::sqrt(W2) * t);
      CHECK(std::abs(0.5 * (1 + s.lab(2)) - ref * ref / W2) < 1e-12);
      CHECK(std::abs(rabi_excited_population(D, 1.0, t) - ref * ref / W2) < 1e-12);
    }
  }
}

TEST_CASE("full Bloch equations approach the rotating-wave limit") {
  std::vector<double> t;
  for (int i = 0; i <= 200; ++i) t.push_back(0.05 * i);
  auto dev = [&](double eps) {
    const auto b = integrate_bloch(BlochVector(0, 0, -1), rabi_drive({eps, eps, 1.0}), t);
    double m = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      m = std::max(m, std::abs(b[i](2) - rabi_rwa(BlochVector(0, 0, -1), 0, 1.0, eps, t[i]).lab(2)));
    return m;
  };
  const double d1 = dev(25), d2 = dev(50);
  CHECK(d1 / d2 > 1.8);
  CHECK(d2 < 0.05);
}

TEST_CASE("Bloch vector round trip") {
  const BlochVector b(0.3, -0.2, 0.5);
  CHECK((bloch_from_density(density_from_bloch(b)) - b).norm() < 1e-15);
}

TEST_CASE("dressed states diagonalize the JC block") {
  const JCParams p{1.3, 1.0, 0.2};
  const int n_max = 6;
  const Operator H = jc_hamiltonian(p, n_max);
  CHECK((H.m - H.m.adjoint()).norm() < 1e-14);
  for (int n = 1; n <= n_max; ++n) {
    const DressedLevels d = jc_dressed(n, p);
    for (int s = 0; s < 2; ++s) {
      const CVec& v = s == 0 ? d.v_plus : d.v_minus;
      const double E = s == 0 ? d.E_plus : d.E_minus;
      CVec full = CVec::Zero(H.dim());
      full(idx(n, 1)) = v(0);
      full(idx(n - 1, 0)) = v(1);
      CHECK((H.m * full - E * full).norm() < 1e-12);
    }
    CHECK(std::abs(d.E_plus - d.E_minus - d.Omega_n) < 1e-12);
  }
}

TEST_CASE("collapse series agrees with dense JC propagation") {
  const double nbar = 4, g = 1;
  const int n_max = 40;
  const Operator H = jc_hamiltonian({1.0, 1.0, g}, n_max);
  const SpectralPropagator U(H);
  const KetState c = coherent_state(std::sqrt(nbar), n_max);
  CVec psi0 = CVec::Zero(H.dim());
  for (int n = 0; n <= n_max; ++n) psi0(idx(n, 1)) = c.amp(n);
  const PoissonWindow w = poisson_window(nbar);
  for (double t : {0.0, 0.4, 1.1, 2.5, 6.0}) {
    const CVec psi = U.apply(psi0, t);
    double pe = 0;
    for (int n = 0; n <= n_max; ++n) pe += std::norm(psi(idx(n, 0)));
    CHECK(std::abs(pe - collapse_revival_exact(w, g, t)) < 1e-9);
  }
}

TEST_CASE("Poisson window and collapse rate") {
  const PoissonWindow w = poisson_window(100);
  CHECK(w.tail <= 1e-12);
  CHECK(std::abs(w.weights.sum() - 1.0) < 1e-12);
  CHECK(std::abs(fit_collapse_rate(100, 1.0, 4.0) - 1 / std::sqrt(2.0)) < 0.05 / std::sqrt(2.0));
  CHECK_THROWS_AS(poisson_window(0), InvalidArgument);
}

TEST_CASE("revivals sit at twice the listed times") {
  const auto r = measure_revivals(100, 1.0, 160);
  REQUIRE(r.size() >= 2);
  CHECK(std::abs(r[0] / (2 * kPi * 10) - 1) < 0.03);
  CHECK(std::abs(r[1] / (4 * kPi * 10) - 1) < 0.03);
}

TEST_CASE("PDC phases and truncated evolution") {
  CHECK(pdc_analysis({2.0, 1.0}).phase == PDCPhase::Stable);
  CHECK(pdc_analysis({0.5, 1.0}).phase == PDCPhase::Unstable);
  CHECK(pdc_analysis({1.0, 1.0}).phase == PDCPhase::Critical);
  for (double D : {2.0, 0.5, 1.0}) {
    const PDCParams p{D, 1.0};
    const int n_max = 60;
    const SpectralPropagator U(pdc_hamiltonian(p, n_max));
    const FockOps f = fock_ops(n_max);
    for (double t : {0.3, 1.0}) {
      const CVec psi = U.apply(fock_state(0, n_max).amp, t);
      CHECK(std::abs((psi.adjoint() * f.N.m * psi)(0).real() - pdc_photon_number(p, t)) < 1e-3);
    }
  }
}

TEST_CASE("Kerr evolution makes a cat at t = pi/(2g)") {
  const cplx alpha(2.0, 0.0);
  const int n_max = default_cutoff_coherent(alpha);
  const FockOps f = fock_ops(n_max);
  const Operator H = f.N * f.N;
  const CVec psi = SpectralPropagator(H).apply(coherent_state(alpha, n_max).amp, kPi / 2);
  CVec cat = 0.5 * ((1.0 - I) * coherent_state(alpha, n_max).amp + (1.0 + I) * coherent_state(-alpha, n_max).amp);
  CHECK(std::abs(std::norm(cat.normalized().dot(psi)) - 1.0) < 1e-10);
}

TEST_CASE("linear solver handles constant and exponential forcing") {
  LinearSystem s;
  s.B = CMat::Identity(2, 2) * cplx(-1.0, 0.5);
  s.kind = LinearSystem::Forcing::Constant;
  s.y = CVec::Ones(2);
  const auto x = solve_linear(s, CVec::Zero(2), {0.0, 1.0, 50.0});
  const cplx l(-1.0, 0.5);
  CHECK(std::abs(x[1](0) - (std::exp(l) - 1.0) / l) < 1e-12);
  CHECK(std::abs(x[2](0) + 1.0 / l) < 1e-12);
  s.kind = LinearSystem::Forcing::Exponential;
  s.mu = l;
  const auto y = solve_linear(s, CVec::Zero(2), {2.0});
  CHECK(std::abs(y[0](0) - 2.0 * std::exp(2.0 * l)) < 1e-12);
}
