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

#include "qoptics/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qoptics/linalg.hpp"

namespace qo {

void RFParams::validate() const {
  require(std::isfinite(P) && P >= 0, "RFParams: P must be >= 0");
  require(std::isfinite(gamma) && gamma > 0, "RFParams: gamma must be > 0");
}

void OPOParams::validate() const {
  require(std::isfinite(gamma) && gamma > 0, "OPOParams: gamma must be > 0");
  require(std::isfinite(g) && g >= 0, "OPOParams: g must be >= 0");
  require(sigma() < 1, "OPOParams: sigma = g/gamma must be < 1 (below threshold)");
}

namespace {

void check_tau_grid(const std::vector<double>& tau) {
  require(!tau.empty(), "tau grid is empty");
  require(tau.front() == 0.0, "tau grid must start at 0");
  for (std::size_t i = 1; i < tau.size(); ++i) require(tau[i] > tau[i - 1], "tau grid must be strictly increasing");
}

CMat initial_density(const LindbladModel& m, const InitialState& initial, const Settings& s) {
  if (std::holds_alternative<Steady>(initial)) return steady_state(m, s).rho;
  const DensityMatrix& rho = std::get<DensityMatrix>(initial);
  require(rho.basis == m.basis, "initial state basis differs from model basis");
  if (auto v = density_violation(rho.rho, s.tol)) throw InvalidArgument("initial state " + *v);
  return rho.rho;
}

// Random density matrices supported away from every Fock cutoff.
CMat random_low_state(const BasisSpec& b, std::mt19937_64& gen) {
  const int d = b.total_dim();
  std::vector<int> allowed;
  for (int idx = 0; idx < d; ++idx) {
    int rest = idx;
    bool ok = true;
    for (int f = static_cast<int>(b.factors.size()) - 1; f >= 0; --f) {
      const int df = b.factors[f].dim();
      const int level = rest % df;
      rest /= df;
      if (b.factors[f].kind == Factor::Kind::Fock && level > b.factors[f].n_max / 2) ok = false;
    }
    if (ok) allowed.push_back(idx);
  }
  std::normal_distribution<double> nd;
  const int k = static_cast<int>(allowed.size());
  CMat G(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = cplx(nd(gen), nd(gen));
  const CMat small = G * G.adjoint();
  CMat rho = CMat::Zero(d, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) rho(allowed[i], allowed[j]) = small(i, j);
  return rho / rho.trace();
}

}  // namespace

CorrelationSeries regression_correlator(const Operator& A, const Operator& B, const Operator& C,
                                        const LindbladModel& m, const std::vector<double>& tau_grid,
                                        const InitialState& initial, const Settings& s) {
  check_tau_grid(tau_grid);
  require(A.basis == m.basis && B.basis == m.basis && C.basis == m.basis,
          "regression_correlator: operators must share the model basis");
  const CMat rho = initial_density(m, initial, s);
  const std::vector<CMat> Y = propagate_operator(C.m * rho * A.m, m, tau_grid, s);
  CorrelationSeries out{tau_grid, {}, CorrelationKind::Generic, "system operators"};
  out.values.reserve(Y.size());
  for (const auto& y : Y) out.values.push_back((B.m * y).trace());
  return out;
}

CorrelationSeries g2_normalized(const CorrelationSeries& series, double n_mean) {
  if (!(n_mean > 0)) throw InvalidArgument("g2_normalized: zero emission (mean photon number must be > 0)");
  CorrelationSeries out = series;
  for (auto& v : out.values) v /= n_mean * n_mean;
  out.kind = CorrelationKind::G2;
  out.normalization = "divided by <n>^2";
  return out;
}

RegressionBundle regression_formula(const std::vector<Operator>& ops, const CMat& M, const Operator& A,
                                    const Operator& C, const LindbladModel& m, const std::vector<double>& tau_grid,
                                    const InitialState& initial, const Settings& s) {
  check_tau_grid(tau_grid);
  const int n = static_cast<int>(ops.size());
  require(n > 0, "regression_formula: empty operator set");
  require(M.rows() == n && M.cols() == n, "regression_formula: M must be " + std::to_string(n) + "x" +
                                              std::to_string(n));
  for (const auto& o : ops) require(o.basis == m.basis, "regression_formula: operator basis mismatch");

  std::mt19937_64 gen(0x5eed);
  double residual = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const DensityMatrix probe{m.basis, random_low_state(m.basis, gen), 0.0};
    CVec mom(n);
    for (int k = 0; k < n; ++k) mom(k) = expectation(ops[k], probe);
    const CVec pred = M * mom;
    for (int j = 0; j < n; ++j) {
      const cplx lhs = moment_rhs(ops[j], m, probe);
      const double scale = 1.0 + std::abs(lhs) + (M.row(j).cwiseAbs() * mom.cwiseAbs()).sum();
      residual = std::max(residual, std::abs(lhs - pred(j)) / scale);
    }
  }
  if (residual > s.tol.close)
    throw InvalidArgument("regression_formula: operator set does not close under the model (residual " +
                          std::to_string(residual) + ")");

  const CMat rho = initial_density(m, initial, s);
  const CMat X = C.m * rho * A.m;
  CVec y0(n);
  for (int j = 0; j < n; ++j) y0(j) = (ops[j].m * X).trace();
  RegressionBundle out{std::vector<CorrelationSeries>(n), residual};
  for (auto& sr : out.series) sr.tau = tau_grid;
  for (double tau : tau_grid) {
    const CVec y = expm(CMat(M * tau)).value * y0;
    for (int j = 0; j < n; ++j) out.series[j].values.push_back(y(j));
  }
  return out;
}

RFSample rf_g2_sample(const RFParams& p, double tau) {
  p.validate();
  const double u = 0.5 * p.gamma;
  const double x = u * tau;
  const double disc = 9.0 - 16.0 * p.P;
  // e^{-5x} cosh(r x) and e^{-5x} sinh(r x)/r, written to stay finite for large x.
  double ec, es;
  if (std::abs(disc) < 1e-14) {
    ec = std::exp(-5 * x);
    es = x * ec;
  } else if (disc > 0) {
    const double r = std::sqrt(disc);
    const double ep = std::exp((r - 5) * x), em = std::exp(-(r + 5) * x);
    ec = 0.5 * (ep + em);
    es = 0.5 * (ep - em) / r;
  } else {
    const double r = std::sqrt(-disc);
    const double e = std::exp(-5 * x);
    ec = e * std::cos(r * x);
    es = e * std::sin(r * x) / r;
  }
  const double K = 16.0 * (1.0 + p.P);
  return {1.0 - (ec + 5 * es), K * u * es, K * u * u * (ec - 5 * es)};
}

RFResult rf_analytics(const RFParams& p, const std::vector<double>& tau_grid) {
  p.validate();
  RFResult out{p.P / (2.0 * (1.0 + p.P)), {tau_grid, {}, CorrelationKind::G2, "normalized"}, {}};
  if (!p.resonant) {
    out.g2.tau.clear();
    return out;
  }
  check_tau_grid(tau_grid);
  for (double t : tau_grid) {
    out.samples.push_back(rf_g2_sample(p, t));
    out.g2.values.emplace_back(out.samples.back().g2);
  }
  return out;
}

OPOSpectra opo_spectra(const OPOParams& p, const std::vector<double>& Omega_grid) {
  p.validate();
  const double s = p.sigma();
  OPOSpectra out;
  out.V0.Omega = out.Vpi2.Omega = Omega_grid;
  for (double W : Omega_grid) {
    const double w2 = (W / p.gamma) * (W / p.gamma);
    out.V0.values.push_back(1 + 4 * s / ((1 - s) * (1 - s) + w2));
    out.Vpi2.values.push_back(1 - 4 * s / ((1 + s) * (1 + s) + w2));
  }
  return out;
}

double thermal_spectrum(double gamma, double nbar, double Omega) {
  return 1 + 8 * gamma * gamma * nbar / (gamma * gamma + Omega * Omega);
}

namespace {

struct TauPlan {
  double h;
  int n;  // even number of intervals
};

TauPlan plan_tau(double radius, double slowest, const std::vector<double>& Omega_grid, const SpectrumOptions& opt) {
  if (!(slowest > 0)) throw NumericError("spectrum_numeric: correlations do not decay (slowest rate " +
                                         std::to_string(slowest) + ")");
  double wmax = 0;
  for (double W : Omega_grid) wmax = std::max(wmax, std::abs(W));
  double h = opt.tau_step > 0 ? opt.tau_step : 0.02 / radius;
  if (opt.tau_step <= 0 && wmax > 0) h = std::min(h, kPi / (20 * wmax));
  const double tmax = opt.tau_max > 0 ? opt.tau_max : 20.0 / slowest;
  int n = static_cast<int>(std::ceil(tmax / h));
  if (n % 2) ++n;
  return {tmax / n, n};
}

SpectrumSeries transform(const std::vector<cplx>& c, double h, double kappa, const std::vector<double>& Omega_grid,
                         double slowest) {
  const int n = static_cast<int>(c.size()) - 1;
  SpectrumSeries out{Omega_grid, {}, 0};
  for (double W : Omega_grid) {
    cplx acc = 0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += w * std::exp(I * W * (k * h)) * c[k];
    }
    out.values.push_back(1 + 2 * kappa * (acc * (h / 3)).real());
  }
  out.leakage_bound = 2 * kappa * std::abs(c.back()) / slowest;
  return out;
}

}  // namespace

SpectrumSeries spectrum_numeric(const LangevinLinearModel& m, double phase, const std::vector<double>& Omega_grid,
                                double kappa, const SpectrumOptions& opt) {
  require(m.A.rows() == 2 && m.A.cols() == 2, "spectrum_numeric: linear model must be single-mode (2x2)");
  require(kappa > 0, "spectrum_numeric: kappa must be > 0");
  const LangevinSteady st = langevin_steady(m);
  Eigen::ComplexEigenSolver<CMat> es(m.A, false);
  const double slowest = -es.eigenvalues().real().maxCoeff();
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  const TauPlan plan = plan_tau(radius, slowest, Omega_grid, opt);
  const CMat step = expm(CMat(m.A * plan.h)).value;
  const cplx e2 = std::exp(-2.0 * I * phase);
  CMat P = CMat::Identity(2, 2);
  std::vector<cplx> c;
  c.reserve(plan.n + 1);
  for (int k = 0; k <= plan.n; ++k) {
    const CMat fwd = P * st.M;               // <dv(tau) dv^T(0)>
    const CMat bwd = st.M * P.transpose();   // <dv(0) dv^T(tau)>
    c.push_back(e2 * fwd(0, 0) + std::conj(e2) * bwd(1, 1) + bwd(1, 0) + fwd(1, 0));
    P = step * P;
  }
  return transform(c, plan.h, kappa, Omega_grid, slowest);
}

SpectrumSeries spectrum_numeric(const LindbladModel& m, const Operator& a, double phase,
                                const std::vector<double>& Omega_grid, double kappa, const Settings& s) {
  require(a.basis == m.basis, "spectrum_numeric: mode operator basis mismatch");
  require(kappa > 0, "spectrum_numeric: kappa must be > 0");
  const int d = m.basis.total_dim();
  const CMat rho = steady_state(m, s).rho;
  const CMat& A = a.m;
  const CMat Ad = A.adjoint();
  // L' = L - |rho><<1| equals L on traceless operators and has no zero eigenvalue.
  const CVec rv = vec(rho);
  CMat Lp = build_liouvillian(m, s.tol).L;
  for (int i = 0; i < d; ++i) Lp.col(i + i * d) -= rv;
  // Fluctuation parts of rho a^dag and a rho; their propagated traces give the connected correlators.
  const CVec x1 = vec(CMat(rho * Ad - rho * (rho * Ad).trace()));
  const CVec x2 = vec(CMat(A * rho - rho * (A * rho).trace()));
  const cplx e2 = std::exp(-2.0 * I * phase);
  SpectrumSeries out{Omega_grid, {}, 0};
  for (double W : Omega_grid) {
    // int_0^inf e^{i W tau} e^{L tau} x dtau = -(L + i W)^{-1} x on traceless x.
    Eigen::PartialPivLU<CMat> lu(Lp + I * W * CMat::Identity(d * d, d * d));
    const CMat Z1 = unvec(CVec(-lu.solve(x1)), d), Z2 = unvec(CVec(-lu.solve(x2)), d);
    const cplx aa = (A * Z2).trace(), ada = (Ad * Z2).trace();
    const cplx adad = (Ad * Z1).trace(), ad_a = (A * Z1).trace();
    const cplx acc = e2 * aa + std::conj(e2) * adad + ada + ad_a;
    if (!std::isfinite(acc.real())) throw NumericError("spectrum_numeric: singular resolvent at Omega = " + std::to_string(W));
    out.values.push_back(1 + 2 * kappa * acc.real());
  }
  return out;
}

CorrelationSeries opo_g2(const OPOParams& p, const std::vector<double>& tau_grid) {
  p.validate();
  check_tau_grid(tau_grid);
  const double s = p.sigma();
  const double s1 = s / (1 - s), s2 = s / (1 + s);
  const double n = 0.25 * (s1 - s2);
  CorrelationSeries out{tau_grid, {}, CorrelationKind::G2, "system operators"};
  for (double t : tau_grid) {
    const double e1 = std::exp(-(1 - s) * p.gamma * t), e2 = std::exp(-(1 + s) * p.gamma * t);
    const double adad = 0.25 * (s1 * e1 + s2 * e2);
    const double ada = 0.25 * (s1 * e1 - s2 * e2);
    out.values.emplace_back(adad * adad + ada * ada + n * n);
  }
  return out;
}

CorrelationSeries thermal_G2(double gamma, double nbar, const std::vector<double>& tau_grid) {
  require(gamma > 0 && nbar >= 0, "thermal_G2: need gamma > 0, nbar >= 0");
  check_tau_grid(tau_grid);
  CorrelationSeries out{tau_grid, {}, CorrelationKind::G2, "system operators"};
  for (double t : tau_grid) {
    const double e = std::exp(-2 * gamma * t);
    out.values.emplace_back(2 * nbar * nbar * e + nbar * nbar * (1 - e));
  }
  return out;
}

ScaledSeries input_output_scale(const CorrelationSeries& system, double kappa, int N, int M, EmitterKind kind) {
  require(kappa > 0, "input_output_scale: kappa must be > 0");
  require(N >= 0 && M >= 0, "input_output_scale: operator counts must be >= 0");
  const double f = std::pow(kappa, 0.5 * (N + M));
  ScaledSeries out{system, f,
                   kind == EmitterKind::Cavity
                       ? "cavity: kappa = 2 gamma, b_out = sqrt(2 gamma) a - b_in"
                       : "atom: kappa = gamma, b_out = sqrt(gamma) sigma - b_in (half the emission collected)"};
  for (auto& v : out.series.values) v *= f;
  out.series.normalization = "output field (zero-temperature input)";
  return out;
}

}  // namespace qo
