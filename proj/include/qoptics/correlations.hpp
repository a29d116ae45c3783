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

#include <string>
#include <variant>
#include <vector>

#include "qoptics/open_dynamics.hpp"

namespace qo {

enum class CorrelationKind { Generic, G1, G2, QuadratureCovariance };

struct CorrelationSeries {
  std::vector<double> tau;
  std::vector<cplx> values;
  CorrelationKind kind = CorrelationKind::Generic;
  std::string normalization = "system operators";
};

struct SpectrumSeries {
  std::vector<double> Omega;
  std::vector<double> values;
  double leakage_bound = 0;  // bound on the dropped tail of the covariance integral
};

struct RFParams {
  double P = 0;      // saturation parameter |E|^2 / (gamma^2 + Delta^2)
  double gamma = 1;
  bool resonant = true;
  void validate() const;
};

struct OPOParams {
  double gamma = 1;
  double g = 0;
  double sigma() const { return g / gamma; }
  void validate() const;
};

struct Steady {};
using InitialState = std::variant<DensityMatrix, Steady>;

// tr{B e^{L tau}[C rho A]} on tau_grid (strictly increasing from 0).
CorrelationSeries regression_correlator(const Operator& A, const Operator& B, const Operator& C,
                                        const LindbladModel& m, const std::vector<double>& tau_grid,
                                        const InitialState& initial = Steady{},
                                        const Settings& s = default_settings());

CorrelationSeries g2_normalized(const CorrelationSeries& series, double n_mean);

struct RegressionBundle {
  std::vector<CorrelationSeries> series;  // one per operator in the closed set
  double closure_residual;
};

// Moment-equation shortcut: d/dtau <A B_j(tau) C> = sum_k M_jk <A B_k(tau) C>.
// Closure L^dag[B_j] = sum_k M_jk B_k is checked on random states away from the Fock cutoff.
RegressionBundle regression_formula(const std::vector<Operator>& ops, const CMat& M, const Operator& A,
                                    const Operator& C, const LindbladModel& m, const std::vector<double>& tau_grid,
                                    const InitialState& initial = Steady{}, const Settings& s = default_settings());

struct RFSample {
  double g2, dg2, d2g2;  // value and tau derivatives
};
struct RFResult {
  double pe_bar;
  CorrelationSeries g2;
  std::vector<RFSample> samples;
};
RFSample rf_g2_sample(const RFParams& p, double tau);
RFResult rf_analytics(const RFParams& p, const std::vector<double>& tau_grid);

struct OPOSpectra {
  SpectrumSeries V0, Vpi2;
};
OPOSpectra opo_spectra(const OPOParams& p, const std::vector<double>& Omega_grid);

struct SpectrumOptions {
  double kappa = 0;        // output coupling; 0 means 2 gamma from the model
  double tau_step = 0;     // 0: from the spectral radius and the frequency grid
  double tau_max = 0;      // 0: 20 / slowest decay
};

// V(Omega) = 1 + 2 kappa Re int_0^inf e^{i Omega tau} <:dX_phi(0) dX_phi(tau):> dtau,
// with X_phi = e^{-i phi} a + e^{i phi} a^dag.
SpectrumSeries spectrum_numeric(const LangevinLinearModel& m, double phase, const std::vector<double>& Omega_grid,
                                double kappa, const SpectrumOptions& opt = {});
// Same spectrum from the master equation via the resolvent of L; exact up to the Fock cutoff.
SpectrumSeries spectrum_numeric(const LindbladModel& m, const Operator& a, double phase,
                                const std::vector<double>& Omega_grid, double kappa,
                                const Settings& s = default_settings());

// 1 + 8 gamma^2 nbar / (gamma^2 + Omega^2): empty cavity in a thermal bath, any phase.
double thermal_spectrum(double gamma, double nbar, double Omega);

CorrelationSeries opo_g2(const OPOParams& p, const std::vector<double>& tau_grid);
// 2 nbar^2 e^{-2 gamma tau} + nbar^2 (1 - e^{-2 gamma tau}).
CorrelationSeries thermal_G2(double gamma, double nbar, const std::vector<double>& tau_grid);

enum class EmitterKind { Cavity, Atom };
struct ScaledSeries {
  CorrelationSeries series;
  double factor;
  std::string convention;
};
// Output-field correlator: kappa^{(N+M)/2} times the system correlator.
ScaledSeries input_output_scale(const CorrelationSeries& system, double kappa, int N, int M, EmitterKind kind);

}  // namespace qo
