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

#include "qoptics/correlations.hpp"

using namespace qo;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
  return t;
}

LindbladModel thermal_cavity(double gamma, double nbar, int n_max, double Delta = 0) {
  CavityParams p;
  p.gamma = gamma;
  p.nbar = nbar;
  p.Delta = Delta;
  return cavity_model(p, n_max);
}

}  // namespace

TEST_CASE("regression correlator at zero delay is the direct expectation") {
  CavityParams p;
  p.gamma = 0.6;
  p.E = {0.4, 0.2};
  p.nbar = 0.3;
  const int n_max = 18;
  const LindbladModel m = cavity_model(p, n_max);
  const FockOps f = fock_ops(n_max);
  const DensityMatrix ss = steady_state(m);
  const CorrelationSeries c = regression_correlator(f.a_dag, f.N, f.a, m, {0.0, 0.5}, ss);
  CHECK(std::abs(c.values[0] - expectation(f.a_dag * f.N * f.a, ss)) < 1e-10);
  const CorrelationSeries s = regression_correlator(f.a_dag, f.N, f.a, m, {0.0, 0.5});
  CHECK(std::abs(s.values[1] - c.values[1]) < 1e-10);
  CHECK_THROWS_AS(regression_correlator(f.a_dag, f.N, f.a, m, {0.5, 1.0}), InvalidArgument);
}

TEST_CASE("thermal light bunches") {
  const double gamma = 0.7, nbar = 0.4;
  const LindbladModel m = thermal_cavity(gamma, nbar, 30);
  const FockOps f = fock_ops(30);
  const auto tau = grid(0, 4, 21);
  const CorrelationSeries G = regression_correlator(f.a_dag, f.N, f.a, m, tau);
  const CorrelationSeries g = g2_normalized(G, expectation(f.N, steady_state(m)).real());
  for (std::size_t i = 0; i < tau.size(); ++i) CHECK(std::abs(g.values[i].real() - (1 + std::exp(-2 * gamma * tau[i]))) < 1e-8);
  const CorrelationSeries Ga = thermal_G2(gamma, nbar, tau);
  for (std::size_t i = 0; i < tau.size(); ++i) CHECK(std::abs(Ga.values[i] - G.values[i]) < 1e-8);
  CHECK_THROWS_AS(g2_normalized(G, 0.0), InvalidArgument);
}

TEST_CASE("coherent light has flat g2") {
  CavityParams p;
  p.gamma = 1.0;
  p.Delta = 0.4;
  p.E = {0.7, 0.0};
  const int n_max = 20;
  const LindbladModel m = cavity_model(p, n_max);
  const FockOps f = fock_ops(n_max);
  const auto tau = grid(0, 3, 13);
  const CorrelationSeries G = regression_correlator(f.a_dag, f.N, f.a, m, tau);
  const CorrelationSeries g = g2_normalized(G, expectation(f.N, steady_state(m)).real());
  for (const auto& v : g.values) CHECK(std::abs(v - 1.0) < 1e-8);
}

TEST_CASE("regression formula follows the closed moment set") {
  const double gamma = 0.5, nbar = 0.6, D = 0.3;
  const int n_max = 30;
  const LindbladModel m = thermal_cavity(gamma, nbar, n_max, D);
  const FockOps f = fock_ops(n_max);
  const auto tau = grid(0, 3, 7);
  CMat M(1, 1);
  M(0, 0) = cplx(-gamma, D);
  const RegressionBundle b = regression_formula({f.a}, M, f.a_dag, Operator::identity(f.a.basis), m, tau);
  CHECK(b.closure_residual < 1e-9);
  for (std::size_t i = 0; i < tau.size(); ++i)
    CHECK(std::abs(b.series[0].values[i] - nbar * std::exp(cplx(-gamma, D) * tau[i])) < 1e-9);
  CMat wrong = M;
  wrong(0, 0) = cplx(-2 * gamma, D);
  CHECK_THROWS_AS(regression_formula({f.a}, wrong, f.a_dag, Operator::identity(f.a.basis), m, tau), InvalidArgument);
}

TEST_CASE("resonance fluorescence antibunching") {
  for (double P : {0.1, 9.0 / 16.0, 3.0, 100.0}) {
    const RFParams p{P, 1.0, true};
    const auto tau = grid(0, 20, 1001);
    const RFResult r = rf_analytics(p, tau);
    CHECK(std::abs(r.pe_bar - P / (2 * (1 + P))) < 1e-15);
    CHECK(std::abs(r.samples.front().g2) < 1e-14);
    CHECK(std::abs(r.samples.back().g2 - 1) < 1e-6);
    for (const auto& s : r.samples) CHECK(std::abs(s.d2g2 + 5 * s.dg2 + 4 * (1 + P) * (s.g2 - 1)) < 1e-8);
  }
  // Strong drive: successive maxima spaced by pi/|E|.
  const double P = 400;
  const RFParams p{P, 1.0, true};
  const auto tau = grid(0, 1, 20001);
  std::vector<double> peaks;
  const RFResult r = rf_analytics(p, tau);
  for (std::size_t i = 1; i + 1 < tau.size(); ++i)
    if (r.samples[i].g2 > r.samples[i - 1].g2 && r.samples[i].g2 >= r.samples[i + 1].g2) peaks.push_back(tau[i]);
  REQUIRE(peaks.size() >= 3);
  const double E = std::sqrt(P);
  CHECK(std::abs((peaks[2] - peaks[1]) / (kPi / E) - 1) < 0.01);
}

TEST_CASE("OPO spectra multiply to one") {
  for (double s : {0.1, 0.5, 0.9}) {
    const auto W = grid(0, 10, 41);
    const OPOSpectra sp = opo_spectra({1.0, s}, W);
    for (std::size_t i = 0; i < W.size(); ++i) CHECK(std::abs(sp.V0.values[i] * sp.Vpi2.values[i] - 1) < 1e-12);
  }
  CHECK_THROWS_AS(opo_spectra({1.0, 1.0}, {0.0}), InvalidArgument);
}

TEST_CASE("numerical OPO spectrum from the linear model") {
  const auto W = grid(0, 10, 21);
  for (double s : {0.3, 0.7}) {
    const SpectrumSeries n = spectrum_numeric(opo_langevin(1.0, s), kPi / 2, W, 2.0);
    const OPOSpectra a = opo_spectra({1.0, s}, W);
    for (std::size_t i = 0; i < W.size(); ++i) CHECK(std::abs(n.values[i] - a.Vpi2.values[i]) < 1e-4);
    const SpectrumSeries n0 = spectrum_numeric(opo_langevin(1.0, s), 0.0, W, 2.0);
    for (std::size_t i = 0; i < W.size(); ++i) CHECK(std::abs(n0.values[i] - a.V0.values[i]) < 1e-4);
  }
}

TEST_CASE("thermal homodyne spectrum carries the factor 8") {
  const double gamma = 0.5, nbar = 0.3;
  const auto W = grid(0, 5, 11);
  CavityParams p;
  p.gamma = gamma;
  p.nbar = nbar;
  const SpectrumSeries lin = spectrum_numeric(cavity_langevin(p), 0.0, W, 2 * gamma);
  const SpectrumSeries lind = spectrum_numeric(cavity_model(p, 25), fock_ops(25).a, 0.0, W, 2 * gamma);
  for (std::size_t i = 0; i < W.size(); ++i) {
    CHECK(std::abs(lin.values[i] - thermal_spectrum(gamma, nbar, W[i])) < 1e-4);
    CHECK(std::abs(lind.values[i] - thermal_spectrum(gamma, nbar, W[i])) < 1e-4);
    CHECK(lind.values[i] >= 1 - 1e-6);
  }
  CHECK(thermal_spectrum(1.0, 1.0, 0.0) == doctest::Approx(9.0));
}

TEST_CASE("OPO photon correlations against the master equation") {
  const OPOParams p{1.0, 0.3};
  const int n_max = 30;
  const LindbladModel m = opo_model(p.gamma, p.g, n_max);
  const FockOps f = fock_ops(n_max);
  const auto tau = grid(0, 3, 7);
  const CorrelationSeries num = regression_correlator(f.a_dag, f.N, f.a, m, tau);
  const CorrelationSeries ana = opo_g2(p, tau);
  for (std::size_t i = 0; i < tau.size(); ++i) CHECK(std::abs(num.values[i] / ana.values[i] - 1.0) < 0.02);
}

TEST_CASE("input-output scaling") {
  CorrelationSeries s;
  s.tau = {0.0};
  s.values = {2.0};
  const ScaledSeries c = input_output_scale(s, 0.5, 2, 2, EmitterKind::Cavity);
  CHECK(c.factor == doctest::Approx(0.25));
  CHECK(c.series.values[0] == cplx(0.5));
  CHECK(!c.convention.empty());
}
