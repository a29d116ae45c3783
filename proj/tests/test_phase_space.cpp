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
#include <random>

#include "qoptics/phase_space.hpp"

using namespace qo;

TEST_CASE("number-state Wigner functions on the default grid") {
  const PhaseGrid g = PhaseGrid::default_for(4);
  for (int n = 0; n <= 4; ++n) {
    const WignerGrid w = wigner_numeric(DensityMatrix::from_ket(fock_state(n, 4)), g);
    const RVec xs = g.xs(), ps = g.ps();
    double err = 0;
    for (int i = 0; i < g.nx; ++i)
      for (int k = 0; k < g.np; ++k) err = std::max(err, std::abs(w.values(i, k) - wigner_fock(n, xs(i), ps(k))));
    CHECK(err <= 1e-6);
    CHECK(std::abs(integrate(w) - 1.0) <= 1e-6);
  }
  CHECK(std::abs(wigner_fock(0, 0, 0) - 1 / (2 * kPi)) < 1e-15);
  CHECK(std::abs(wigner_fock(1, 0, 0) + 1 / (2 * kPi)) < 1e-15);
}

TEST_CASE("laguerre polynomials") {
  CHECK(laguerre(0, 2.5) == doctest::Approx(1.0));
  CHECK(laguerre(1, 2.5) == doctest::Approx(-1.5));
  CHECK(laguerre(2, 2.5) == doctest::Approx(0.5 * (2.5 * 2.5 - 4 * 2.5 + 2)));
}

TEST_CASE("squeezed and coherent Wigner functions match the Gaussian form") {
  const double r = 0.4;
  const int n_max = default_cutoff_squeezed(r);
  const PhaseGrid g = PhaseGrid::square(6.0, 81);
  const WignerGrid num = wigner_numeric(DensityMatrix::from_ket(squeezed_vacuum(r, n_max)), g);
  const GaussianState gs = symplectic_apply(squeeze_map(r), GaussianState::vacuum());
  const WignerGrid ref = wigner_gaussian_grid(gs, g);
  CHECK((num.values - ref.values).cwiseAbs().maxCoeff() < 1e-8);

  const cplx alpha(1.0, -0.5);
  const WignerGrid nc = wigner_numeric(DensityMatrix::from_ket(coherent_state(alpha, 30)), g);
  const GaussianState gc = symplectic_apply(displacement_map(alpha), GaussianState::vacuum());
  CHECK((nc.values - wigner_gaussian_grid(gc, g).values).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(gc.d(0) == doctest::Approx(2.0));
  CHECK(gc.d(1) == doctest::Approx(-1.0));
}

TEST_CASE("marginals and moments of the vacuum") {
  const PhaseGrid g = PhaseGrid::square(8.0, 161);
  const WignerGrid w = wigner_numeric(DensityMatrix::from_ket(fock_state(0, 2)), g);
  const Marginal m = marginal(w, Axis::X);
  double s = 0;
  for (Eigen::Index i = 0; i < m.values.size(); ++i) s += m.values(i) * g.dx();
  CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(phase_space_moment(w, 2, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(phase_space_moment(w, 1, 1)) < 1e-10);
}

TEST_CASE("overlap formula gives state fidelity") {
  const PhaseGrid g = PhaseGrid::square(7.0, 141);
  const WignerGrid w0 = wigner_numeric(DensityMatrix::from_ket(fock_state(0, 3)), g);
  const WignerGrid w1 = wigner_numeric(DensityMatrix::from_ket(fock_state(1, 3)), g);
  CHECK(overlap_wigner(w0, w0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(overlap_wigner(w0, w1)) < 1e-8);
}

TEST_CASE("squeeze map eigenvalues and Isserlis moment") {
  for (double r : {0.1, 0.5, 1.3}) {
    for (double th : {0.0, 0.7, 2.0}) {
      const GaussianState s = symplectic_apply(squeeze_map(std::polar(r, th)), GaussianState::vacuum());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s.V);
      CHECK(std::abs(es.eigenvalues()(0) - std::exp(-2 * r)) < 1e-12);
      CHECK(std::abs(es.eigenvalues()(1) - std::exp(2 * r)) < 1e-12);
      const Eigen::Matrix2d& V = s.V;
      CHECK(std::abs(gaussian_moment(V, {0, 1, 0, 1}) - (V(0, 0) * V(1, 1) + 2 * V(0, 1) * V(0, 1))) < 1e-12 * V.squaredNorm());
    }
  }
  Eigen::Matrix2d V;
  V << 2.0, 0.3, 0.3, 1.5;
  CHECK(gaussian_moment(V, {0, 0}) == doctest::Approx(2.0));
  CHECK(gaussian_moment(V, {0, 1, 1}) == 0.0);
  CHECK(gaussian_moment(V, {0, 0, 0, 0}) == doctest::Approx(12.0));
}

TEST_CASE("symplectic maps preserve det V") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GaussianState s = GaussianState::vacuum();
  for (int k = 0; k < 100; ++k) {
    s = symplectic_apply(rotation_map(kPi * u(rng)), s);
    s = symplectic_apply(squeeze_map(0.3 * u(rng)), s);
    s = symplectic_apply(displacement_map(cplx(u(rng), u(rng))), s);
    CHECK(std::abs(s.V.determinant() - 1.0) < 1e-9);
  }
  // Strong squeezing chains stay valid even where det V loses digits.
  GaussianState big = GaussianState::vacuum();
  for (int k = 0; k < 10; ++k) big = symplectic_apply(squeeze_map(std::polar(0.5, 0.1 * k)), big);
  CHECK(big.V.allFinite());
}

TEST_CASE("invalid Gaussian inputs are rejected") {
  Eigen::Matrix2d V;
  V << 0.5, 0, 0, 0.5;
  CHECK_THROWS_AS(GaussianState::checked(Eigen::Vector2d::Zero(), V), InvalidArgument);
  Eigen::Matrix2d S;
  S << 2, 0, 0, 2;
  CHECK_THROWS_AS(SymplecticMap::checked(S, Eigen::Vector2d::Zero()), InvalidArgument);
  PhaseGrid bad;
  bad.nx = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("Gaussian parameters from states and complex moments") {
  const cplx alpha(0.6, 0.2);
  const GaussianState g = gaussian_from_state(DensityMatrix::from_ket(coherent_state(alpha, 30)));
  CHECK(g.d(0) == doctest::Approx(1.2));
  CHECK(g.d(1) == doctest::Approx(0.4));
  CHECK((g.V - Eigen::Matrix2d::Identity()).norm() < 1e-9);
  const GaussianState t = gaussian_from_complex_moments(0.0, 0.0, 0.5);
  CHECK((t.V - 2.0 * Eigen::Matrix2d::Identity()).norm() < 1e-12);
}
