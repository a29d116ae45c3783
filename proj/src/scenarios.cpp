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

#include "qoptics/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "qoptics/closed_dynamics.hpp"
#include "qoptics/correlations.hpp"
#include "qoptics/effective_models.hpp"
#include "qoptics/open_dynamics.hpp"
#include "qoptics/phase_space.hpp"

namespace qo {

double Params::real(const std::string& k) const { return v_.at(k).get<double>(); }
int Params::integer(const std::string& k) const { return v_.at(k).get<int>(); }
std::string Params::text(const std::string& k) const { return v_.at(k).get<std::string>(); }

namespace {

using Kind = ParamSpec::Kind;
constexpr double kInf = std::numeric_limits<double>::infinity();

ParamSpec positive(std::string name, double def, std::string help) {
  return {Kind::Real, std::move(name), def, 0.0, kInf, true, false, {}, std::move(help)};
}
ParamSpec nonnegative(std::string name, double def, std::string help) {
  return {Kind::Real, std::move(name), def, 0.0, kInf, false, false, {}, std::move(help)};
}
ParamSpec real_any(std::string name, double def, std::string help) {
  return {Kind::Real, std::move(name), def, -kInf, kInf, false, false, {}, std::move(help)};
}
ParamSpec real_range(std::string name, double def, double lo, double hi, bool lo_open, bool hi_open,
                     std::string help) {
  return {Kind::Real, std::move(name), def, lo, hi, lo_open, hi_open, {}, std::move(help)};
}
ParamSpec integer(std::string name, int def, int lo, int hi, std::string help) {
  return {Kind::Integer, std::move(name), def, double(lo), double(hi), false, false, {}, std::move(help)};
}
ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string help) {
  return {Kind::Text, std::move(name), std::move(def), -kInf, kInf, false, false, std::move(choices), std::move(help)};
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json report_json(const Report& r) { return {{"warnings", r.warnings}, {"notes", r.notes}}; }

SeriesArtifact finish(SeriesArtifact a, json results, const Report& r = {}) {
  a.metadata = {{"results", std::move(results)}, {"report", report_json(r)}};
  return a;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

int thermal_cutoff(double nbar) {
  if (nbar <= 0) return 1;
  const double q = nbar / (1 + nbar);
  return std::max(1, static_cast<int>(std::ceil(std::log(1e-12) / std::log(q))));
}

// Wigner grid of a state with columns x, p, W; ix-major rows.
void add_wigner_columns(SeriesArtifact& a, const WignerGrid& w) {
  const RVec xs = w.grid.xs(), ps = w.grid.ps();
  std::vector<double> X, P, W;
  for (int i = 0; i < w.grid.nx; ++i)
    for (int k = 0; k < w.grid.np; ++k) {
      X.push_back(xs(i));
      P.push_back(ps(k));
      W.push_back(w.values(i, k));
    }
  a.add("x", std::move(X));
  a.add("p", std::move(P));
  a.add("W", std::move(W));
  a.grid = w;
}

PhaseGrid pick_grid(const Params& p, int n_max) {
  const double hw = p.real("half_width");
  const int n = p.integer("n_grid");
  if (hw > 0) return PhaseGrid::square(hw, n);
  PhaseGrid g = PhaseGrid::default_for(n_max);
  g.nx = g.np = n;
  return g;
}

json wigner_summary(const WignerGrid& w) {
  const double cell = w.grid.dx() * w.grid.dp();
  double neg = 0;
  for (Eigen::Index i = 0; i < w.values.size(); ++i) neg += std::max(0.0, -w.values.data()[i]) * cell;
  return {{"integral", integrate(w)}, {"min_W", w.values.minCoeff()}, {"max_W", w.values.maxCoeff()},
          {"negative_volume", neg}};
}

// ---------------------------------------------------------------------------

SeriesArtifact run_rabi(const Params& p, const RunContext&) {
  const double eps = p.real("epsilon"), Om = p.real("Omega"), D = p.real("Delta");
  const RabiParams rp{eps, eps + D, Om};
  const auto t = linspace(0, p.real("t_max"), p.integer("n_t"));
  const BlochVector b0(0, 0, -1);
  const auto full = integrate_bloch(b0, rabi_drive(rp), t);
  std::vector<double> pf, pr, pa, bxf, bxr;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const RabiSolution s = rabi_rwa(b0, D, Om, rp.omega, t[i]);
    pf.push_back(0.5 * (1 + full[i](2)));
    pr.push_back(0.5 * (1 + s.lab(2)));
    pa.push_back(rabi_excited_population(D, Om, t[i]));
    bxf.push_back(full[i](0));
    bxr.push_back(s.lab(0));
  }
  json res = {{"max_dev_full_rwa", max_abs_diff(pf, pr)}, {"max_dev_rwa_formula", max_abs_diff(pr, pa)}};
  SeriesArtifact a;
  a.add("t", t);
  a.add("pe_full", std::move(pf));
  a.add("pe_rwa", std::move(pr));
  a.add("pe_formula", std::move(pa));
  a.add("bx_full", std::move(bxf));
  a.add("bx_rwa", std::move(bxr));
  return finish(std::move(a), std::move(res));
}

SeriesArtifact run_collapse(const Params& p, const RunContext&) {
  const double nbar = p.real("nbar"), g = p.real("g");
  const auto t = linspace(0, p.real("t_max") / g, p.integer("n_t"));
  const CollapseRevival cr = collapse_revival(nbar, g, t);
  Report rep;
  rep.note("measured revivals sit at 2 pi m sqrt(nbar)/g; the listed pi m sqrt(nbar)/g values are kept for comparison");
  json res = {{"gamma_c", cr.gamma_c},
              {"gamma_c_fitted", fit_collapse_rate(nbar, g, 4.0 / g)},
              {"revivals_pi_m", cr.t_revivals},
              {"revivals_measured", cr.t_revivals_measured}};
  SeriesArtifact a;
  a.add("gt", [&] {
    std::vector<double> v;
    for (double x : t) v.push_back(g * x);
    return v;
  }());
  a.add("pe_exact", cr.series);
  a.add("pe_envelope", cr.envelope);
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_pdc(const Params& p, const RunContext&) {
  const PDCParams pp{p.real("Delta"), p.real("g")};
  const int n_max = p.integer("n_max");
  const auto t = linspace(0, p.real("t_max"), p.integer("n_t"));
  const Operator H = pdc_hamiltonian(pp, n_max);
  const SpectralPropagator U(H);
  const FockOps f = fock_ops(n_max);
  const CVec vac = fock_state(0, n_max).amp;
  std::vector<double> na, nn;
  double top = 0;
  for (double x : t) {
    const CVec psi = U.apply(vac, x);
    na.push_back(pdc_photon_number(pp, x));
    nn.push_back((psi.adjoint() * f.N.m * psi)(0).real());
    top = std::max(top, std::norm(psi(n_max)) + std::norm(psi(n_max - 1)));
  }
  const PDCAnalysis an = pdc_analysis(pp);
  const char* phase = an.phase == PDCPhase::Stable ? "stable" : an.phase == PDCPhase::Unstable ? "unstable" : "critical";
  Report rep;
  if (top > 1e-6) rep.warn("population in the top two Fock levels reaches " + format_double(top));
  json res = {{"phase", phase}, {"r", std::isfinite(an.r) ? json(an.r) : json(nullptr)}, {"rate", an.rate},
              {"max_abs_error", max_abs_diff(na, nn)}, {"top_level_population", top}};
  SeriesArtifact a;
  a.add("t", t);
  a.add("n_analytic", std::move(na));
  a.add("n_numeric", std::move(nn));
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_driven_cavity(const Params& p, const RunContext&) {
  CavityParams cp;
  cp.gamma = p.real("gamma");
  cp.Delta = p.real("Delta");
  cp.E = {p.real("E_re"), p.real("E_im")};
  cp.nbar = p.real("nbar");
  const int n_max = p.integer("n_max");
  const auto t = linspace(0, p.real("t_max"), p.integer("n_t"));
  const LindbladModel m = cavity_model(cp, n_max);
  const FockOps f = fock_ops(n_max);
  Report rep;
  const MasterSeries ms = evolve_master(DensityMatrix::from_ket(fock_state(0, n_max)), m, t, default_settings(), &rep);
  std::vector<cplx> an, aa;
  std::vector<double> nn, nan;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CavityMoments cm = driven_cavity_analytic(cp, {0, 0, 0}, t[i]);
    an.push_back(expectation(f.a, ms.rho[i]));
    aa.push_back(cm.mean_a);
    nn.push_back(expectation(f.N, ms.rho[i]).real());
    nan.push_back(std::norm(cm.mean_a) + cm.n_fluct);
  }
  const DensityMatrix ss = steady_state(m);
  const cplx mean_ss = expectation(f.a, ss);
  const double n_ss = expectation(f.N, ss).real();
  const double n_formula = std::norm(cp.E) / (cp.gamma * cp.gamma + cp.Delta * cp.Delta) + cp.nbar;
  rep.note("steady <a> follows E/(gamma - i Delta) from the moment equations; the form E/(gamma + i Delta) "
           "corresponds to the opposite detuning sign and differs by " +
           format_double(std::abs(cp.E / cplx(cp.gamma, cp.Delta) - driven_cavity_steady_mean(cp))));
  const double top = ss.rho(n_max, n_max).real();
  if (top > 1e-10) rep.warn("steady-state population of the top Fock level is " + format_double(top));
  json res = {{"steady_mean_analytic", to_json(driven_cavity_steady_mean(cp))},
              {"steady_mean_numeric", to_json(mean_ss)},
              {"steady_mean_alternative_sign", to_json(cp.E / cplx(cp.gamma, cp.Delta))},
              {"steady_photon_number_analytic", n_formula},
              {"steady_photon_number_numeric", n_ss}};
  SeriesArtifact a;
  a.add("t", t);
  a.add("mean_a_numeric", an);
  a.add("mean_a_analytic", aa);
  a.add("n_numeric", std::move(nn));
  a.add("n_analytic", std::move(nan));
  return finish(std::move(a), std::move(res), rep);
}

double emission_crossing(double gamma, double nbar) {
  const double pinf = nbar / (2 * nbar + 1);
  return std::log((1 - pinf) / (0.5 - pinf)) / (2 * gamma * (2 * nbar + 1));
}

SeriesArtifact run_emission(const Params& p, const RunContext& ctx) {
  const double gamma = p.real("gamma"), nbar = p.real("nbar");
  const int n_traj = p.integer("n_traj");
  const auto t = linspace(0, p.real("t_max"), p.integer("n_t"));
  const LindbladModel m = atom_model(gamma, nbar);
  const KetState e{BasisSpec::two_level(), CVec::Unit(2, 0)};
  Report rep;
  const MasterSeries ms = evolve_master(DensityMatrix::from_ket(e), m, t, default_settings(), &rep);
  const double pinf = nbar / (2 * nbar + 1), rate = 2 * gamma * (2 * nbar + 1);
  std::vector<double> pm, pa, pj, se;
  for (std::size_t i = 0; i < t.size(); ++i) {
    pm.push_back(ms.rho[i].rho(0, 0).real());
    pa.push_back(pinf + (1 - pinf) * std::exp(-rate * t[i]));
  }
  json res = {{"crossing_time_analytic", emission_crossing(gamma, nbar)}};
  // Bisection on the master equation for p_e = 1/2.
  {
    double lo = 0, hi = 2 * emission_crossing(gamma, nbar);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const MasterSeries s = evolve_master(DensityMatrix::from_ket(e), m, {0.0, mid});
      (s.rho[1].rho(0, 0).real() > 0.5 ? lo : hi) = mid;
    }
    res["crossing_time_numeric"] = 0.5 * (lo + hi);
  }
  if (n_traj > 0) {
    McwfOptions opt;
    opt.threads = ctx.threads;
    opt.keep_records = false;
    const McwfResult mc = mcwf_evolve(e, m, t, n_traj, ctx.seed, opt);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double q = mc.populations(i, 0);
      pj.push_back(q);
      se.push_back(std::sqrt(std::max(0.0, q * (1 - q)) / n_traj));
    }
    res["mcwf_dt"] = mc.dt;
    res["mcwf_jump_probability_bound"] = mc.p_bound;
    res["mcwf_max_abs_error"] = max_abs_diff(pj, pa);
  }
  SeriesArtifact a;
  a.add("t", t);
  a.add("pe_master", std::move(pm));
  a.add("pe_analytic", std::move(pa));
  if (n_traj > 0) {
    a.add("pe_mcwf", std::move(pj));
    a.add("pe_mcwf_stderr", std::move(se));
  }
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_dephasing(const Params& p, const RunContext&) {
  const double gp = p.real("gamma_phi");
  const auto t = linspace(0, p.real("t_max"), p.integer("n_t"));
  const LindbladModel m = dephasing_model(gp, p.real("epsilon"));
  const KetState plus{BasisSpec::two_level(), CVec::Constant(2, 1 / std::sqrt(2.0))};
  Report rep;
  const MasterSeries ms = evolve_master(DensityMatrix::from_ket(plus), m, t, default_settings(), &rep);
  std::vector<double> pe, coh, ca;
  double drift = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    pe.push_back(ms.rho[i].rho(0, 0).real());
    coh.push_back(std::abs(ms.rho[i].rho(0, 1)));
    ca.push_back(0.5 * std::exp(-0.5 * gp * t[i]));
    drift = std::max(drift, std::abs(pe.back() - 0.5));
  }
  json res = {{"max_population_drift", drift}, {"max_coherence_error", max_abs_diff(coh, ca)},
              {"coherence_decay_rate", 0.5 * gp}};
  SeriesArtifact a;
  a.add("t", t);
  a.add("pe", std::move(pe));
  a.add("coherence_abs", std::move(coh));
  a.add("coherence_analytic", std::move(ca));
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_thermal_g2(const Params& p, const RunContext&) {
  CavityParams cp;
  cp.gamma = p.real("gamma");
  cp.nbar = p.real("nbar");
  int n_max = p.integer("n_max");
  if (n_max == 0) n_max = thermal_cutoff(cp.nbar);
  const auto tau = linspace(0, p.real("tau_max"), p.integer("n_tau"));
  const LindbladModel m = cavity_model(cp, n_max);
  const FockOps f = fock_ops(n_max);
  const DensityMatrix ss = steady_state(m);
  const double n_ss = expectation(f.N, ss).real();
  const CorrelationSeries G = regression_correlator(f.a_dag, f.N, f.a, m, tau, ss);
  const CorrelationSeries Ga = thermal_G2(cp.gamma, cp.nbar, tau);
  std::vector<double> g2a, g2r, G2a, G2r;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    g2a.push_back(1 + std::exp(-2 * cp.gamma * tau[i]));
    g2r.push_back(G.values[i].real() / (n_ss * n_ss));
    G2a.push_back(Ga.values[i].real());
    G2r.push_back(G.values[i].real());
  }
  json res = {{"n_max", n_max}, {"steady_photon_number", n_ss}, {"max_g2_error", max_abs_diff(g2a, g2r)}};
  SeriesArtifact a;
  a.add("tau", tau);
  a.add("g2_analytic", std::move(g2a));
  a.add("g2_regression", std::move(g2r));
  a.add("G2_analytic", std::move(G2a));
  a.add("G2_regression", std::move(G2r));
  return finish(std::move(a), std::move(res));
}

SeriesArtifact run_rf(const Params& p, const RunContext&) {
  const RFParams rp{p.real("P"), p.real("gamma"), true};
  const auto tau = linspace(0, p.real("tau_max"), p.integer("n_tau"));
  const RFResult r = rf_analytics(rp, tau);
  const double gm = rp.gamma;
  std::vector<double> g2, res_ode;
  double worst = 0;
  for (const auto& s : r.samples) {
    g2.push_back(s.g2);
    res_ode.push_back(s.d2g2 + 5 * gm * s.dg2 + 4 * gm * gm * (1 + rp.P) * (s.g2 - 1));
    worst = std::max(worst, std::abs(res_ode.back()));
  }
  Report rep;
  rep.note("g2 follows the Bloch system with population decay 4 gamma; the Lindblad atom model decays at 2 gamma");
  json res = {{"pe_bar", r.pe_bar},
              {"E_abs", gm * std::sqrt(rp.P)},
              {"strong_drive_frequency", 2 * gm * std::sqrt(rp.P)},
              {"max_ode_residual", worst}};
  SeriesArtifact a;
  a.add("tau", tau);
  a.add("g2", std::move(g2));
  a.add("ode_residual", std::move(res_ode));
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_opo_squeezing(const Params& p, const RunContext&) {
  const double gamma = p.real("gamma");
  const OPOParams op{gamma, p.real("sigma") * gamma};
  op.validate();
  const auto W = linspace(0, p.real("Omega_max") * gamma, p.integer("n_Omega"));
  const OPOSpectra an = opo_spectra(op, W);
  const LangevinLinearModel lm = opo_langevin(gamma, op.g);
  const SpectrumSeries n0 = spectrum_numeric(lm, 0.0, W, 2 * gamma);
  const SpectrumSeries n1 = spectrum_numeric(lm, kPi / 2, W, 2 * gamma);
  const LangevinSteady st = langevin_steady(lm);
  const CMat& M = st.M;
  const double VX = (M(0, 0) + M(1, 1) + M(0, 1) + M(1, 0)).real();
  const double VP = (M(0, 1) + M(1, 0) - M(0, 0) - M(1, 1)).real();
  double prod = 0;
  for (std::size_t i = 0; i < W.size(); ++i) prod = std::max(prod, std::abs(an.V0.values[i] * an.Vpi2.values[i] - 1));
  json res = {{"VX_lyapunov", VX},
              {"VP_lyapunov", VP},
              {"VX_analytic", gamma / (gamma - op.g)},
              {"VP_analytic", gamma / (gamma + op.g)},
              {"max_product_deviation", prod},
              {"max_error_V0", max_abs_diff(an.V0.values, n0.values)},
              {"max_error_Vpi2", max_abs_diff(an.Vpi2.values, n1.values)},
              {"leakage_bound", std::max(n0.leakage_bound, n1.leakage_bound)}};
  SeriesArtifact a;
  a.add("Omega", W);
  a.add("V0", an.V0.values);
  a.add("Vpi2", an.Vpi2.values);
  a.add("V0_numeric", n0.values);
  a.add("Vpi2_numeric", n1.values);
  return finish(std::move(a), std::move(res));
}

SeriesArtifact run_opo_g2(const Params& p, const RunContext&) {
  const double gamma = p.real("gamma");
  const OPOParams op{gamma, p.real("sigma") * gamma};
  op.validate();
  const int n_max = p.integer("n_max");
  const auto tau = linspace(0, p.real("tau_max"), p.integer("n_tau"));
  const LindbladModel m = opo_model(gamma, op.g, n_max);
  const FockOps f = fock_ops(n_max);
  const DensityMatrix ss = steady_state(m);
  const CorrelationSeries G = regression_correlator(f.a_dag, f.N, f.a, m, tau, ss);
  const CorrelationSeries Ga = opo_g2(op, tau);
  std::vector<double> ga, gr, rel;
  double worst = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    ga.push_back(Ga.values[i].real());
    gr.push_back(G.values[i].real());
    rel.push_back(std::abs(gr.back() - ga.back()) / std::abs(ga.back()));
    worst = std::max(worst, rel.back());
  }
  Report rep;
  const double top = ss.rho(n_max, n_max).real();
  if (top > 1e-8) rep.warn("steady-state population of the top Fock level is " + format_double(top));
  json res = {{"steady_photon_number", expectation(f.N, ss).real()}, {"max_relative_error", worst}};
  SeriesArtifact a;
  a.add("tau", tau);
  a.add("G2_analytic", std::move(ga));
  a.add("G2_regression", std::move(gr));
  a.add("relative_error", std::move(rel));
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_purcell(const Params& p, const RunContext&) {
  const double gamma = p.real("gamma"), g = p.real("g") * gamma, kappa = p.real("kappa") * g;
  const double Delta = p.real("Delta"), nbar = p.real("nbar");
  const int n_max = p.integer("n_max");
  const auto t = linspace(0, p.real("t_max") / gamma, p.integer("n_t"));
  const LindbladModel full = purcell_full_model(g, kappa, gamma, Delta, nbar, n_max);
  const EffectiveMaster eff = effective_master_2nd(purcell_elimination(g, kappa, gamma, Delta, nbar));
  const PurcellRates pr = purcell_rates(g, kappa, gamma, Delta, nbar);

  const bool excited = p.text("initial") == "excited";
  CMat atom = CMat::Zero(2, 2);
  if (excited) {
    atom(0, 0) = 1;
  } else {
    atom(0, 0) = nbar / (2 * nbar + 1);
    atom(1, 1) = 1.0 - atom(0, 0);
  }
  const CMat cav = fock_state(0, n_max).amp * fock_state(0, n_max).amp.adjoint();
  const DensityMatrix rf = DensityMatrix::checked(full.basis, kron(cav, atom));
  const DensityMatrix ra = DensityMatrix::checked(BasisSpec::two_level(), atom);
  Report rep = eff.consistency;
  const MasterSeries sf = evolve_master(rf, full, t, default_settings(), &rep);
  const MasterSeries se = evolve_master(ra, eff.model, t, default_settings(), &rep);
  std::vector<double> pf, pe, td, gt;
  double worst = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const DensityMatrix red = partial_trace(sf.rho[i], {1});
    gt.push_back(gamma * t[i]);
    pf.push_back(red.rho(0, 0).real());
    pe.push_back(se.rho[i].rho(0, 0).real());
    td.push_back(trace_distance(red.rho, se.rho[i].rho));
    worst = std::max(worst, td.back());
  }
  // Rates of the assembled model in the jump-kappa convention.
  double gm = 0, gp = 0;
  for (const auto& j : eff.model.jumps) {
    const double w = j.kappa;
    gm += w * std::norm(j.J.m(1, 0));
    gp += w * std::norm(j.J.m(0, 1));
  }
  json res = {{"Gamma_minus", pr.Gamma_minus},
              {"Gamma_plus", pr.Gamma_plus},
              {"Gamma_eff", pr.Gamma_eff},
              {"nbar_eff", pr.nbar_eff},
              {"delta_eps", pr.delta_eps},
              {"cooperativity", pr.C},
              {"assembled_decay_rate", gm},
              {"assembled_excitation_rate", gp},
              {"assembled_nbar_eff", gp / (gm - gp)},
              {"max_trace_distance", worst}};
  SeriesArtifact a;
  a.add("gamma_t", std::move(gt));
  a.add("pe_full", std::move(pf));
  a.add("pe_effective", std::move(pe));
  a.add("trace_distance", std::move(td));
  return finish(std::move(a), std::move(res), rep);
}

SeriesArtifact run_wigner_gallery(const Params& p, const RunContext&) {
  const std::string kind = p.text("state");
  int n_max = p.integer("n_max");
  const cplx alpha(p.real("alpha_re"), p.real("alpha_im"));
  const cplx z = std::polar(p.real("r"), p.real("theta"));
  const double nbar = p.real("nbar");
  const int n = p.integer("n");
  if (n_max == 0) {
    if (kind == "fock") n_max = n;
    else if (kind == "coherent" || kind == "cat") n_max = default_cutoff_coherent(alpha);
    else if (kind == "squeezed") n_max = default_cutoff_squeezed(p.real("r"));
    else n_max = thermal_cutoff(nbar);
  }
  DensityMatrix rho;
  std::optional<GaussianState> gauss;
  if (kind == "fock") {
    require(n <= n_max, "params.n: exceeds n_max");
    rho = DensityMatrix::from_ket(fock_state(n, n_max));
  } else if (kind == "coherent") {
    rho = DensityMatrix::from_ket(coherent_state(alpha, n_max));
    gauss = symplectic_apply(displacement_map(alpha), GaussianState::vacuum());
  } else if (kind == "squeezed") {
    rho = DensityMatrix::from_ket(squeezed_vacuum(z, n_max));
    gauss = symplectic_apply(squeeze_map(z), GaussianState::vacuum());
  } else if (kind == "thermal") {
    rho = thermal_state(nbar, n_max);
    gauss = GaussianState::checked(Eigen::Vector2d::Zero(), (2 * nbar + 1) * Eigen::Matrix2d::Identity());
  } else {
    const KetState a = coherent_state(alpha, n_max), b = coherent_state(-alpha, n_max);
    KetState cat{a.basis, a.amp + b.amp};
    cat.amp.normalize();
    rho = DensityMatrix::from_ket(cat);
  }
  const PhaseGrid grid = pick_grid(p, n_max);
  const WignerGrid w = wigner_numeric(rho, grid);
  SeriesArtifact a;
  add_wigner_columns(a, w);
  json res = wigner_summary(w);
  res["n_max"] = n_max;
  res["leakage"] = rho.leakage;
  if (kind == "fock" || gauss) {
    const RVec xs = grid.xs(), ps = grid.ps();
    std::vector<double> ex;
    double err = 0;
    for (int i = 0; i < grid.nx; ++i)
      for (int k = 0; k < grid.np; ++k) {
        ex.push_back(gauss ? wigner_gaussian(*gauss, xs(i), ps(k)) : wigner_fock(n, xs(i), ps(k)));
        err = std::max(err, std::abs(ex.back() - w.values(i, k)));
      }
    res["max_abs_error_exact"] = err;
    a.add("W_exact", std::move(ex));
  }
  return finish(std::move(a), std::move(res));
}

SeriesArtifact run_kerr_cat(const Params& p, const RunContext&) {
  const double g = p.real("g");
  const cplx alpha(p.real("alpha_re"), p.real("alpha_im"));
  int n_max = p.integer("n_max");
  if (n_max == 0) n_max = default_cutoff_coherent(alpha);
  const double t = kPi / (2 * g);
  const KetState c = coherent_state(alpha, n_max);
  KetState psi = c;
  for (int k = 0; k <= n_max; ++k) psi.amp(k) *= std::exp(-I * g * double(k) * double(k) * t);
  const KetState m = coherent_state(-alpha, n_max);
  CVec target = 0.5 * ((1.0 - I) * c.amp + (1.0 + I) * m.amp);
  target.normalize();
  const double fid = std::norm(target.dot(psi.amp));
  const PhaseGrid grid = pick_grid(p, n_max);
  const WignerGrid w = wigner_numeric(DensityMatrix::from_ket(psi), grid);
  SeriesArtifact a;
  add_wigner_columns(a, w);
  json res = wigner_summary(w);
  res["t_cat"] = t;
  res["fidelity_with_cat"] = fid;
  res["n_max"] = n_max;
  res["leakage"] = c.leakage;
  return finish(std::move(a), std::move(res));
}

SeriesArtifact run_optomech(const Params& p, const RunContext&) {
  const double g = p.real("g"), kappa = p.real("kappa"), gamma = p.real("gamma"), Om = p.real("Omega_m");
  const double nbar = p.real("nbar");
  const auto D = linspace(p.real("Delta_min") * Om, p.real("Delta_max") * Om, p.integer("n_Delta"));
  std::vector<double> ne, ge, oe;
  for (double d : D) {
    const OptomechRates r = optomech_rates(g, kappa, gamma, d, Om, nbar);
    ne.push_back(r.nbar_eff);
    ge.push_back(r.Gamma_eff);
    oe.push_back(r.Omega_eff);
  }
  const OptomechRates at = optomech_rates(g, kappa, gamma, -Om, Om, nbar);
  json res = {{"floor", kappa * kappa / (4 * Om * Om)},
              {"floor_closed_form", at.floor},
              {"nbar_eff_at_red_sideband", at.nbar_eff},
              {"Gamma_eff_at_red_sideband", at.Gamma_eff},
              {"cooperativity", at.C}};
  SeriesArtifact a;
  a.add("Delta", D);
  a.add("nbar_eff", std::move(ne));
  a.add("Gamma_eff", std::move(ge));
  a.add("Omega_eff", std::move(oe));
  return finish(std::move(a), std::move(res));
}

std::vector<ParamSpec> grid_params() {
  return {nonnegative("half_width", 0, "phase-space half width; 0 picks the default for n_max"),
          integer("n_grid", 257, 3, 2049, "grid points per axis")};
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> r;
  r.push_back({"rabi-bloch",
               "driven two-level atom: full Bloch equations against the rotating-wave solution",
               {"p_e = Omega^2/(Omega^2 + Delta^2) sin^2(sqrt(Omega^2 + Delta^2) t/2)",
                "rotating-wave error shrinks as epsilon/Omega grows"},
               {positive("epsilon", 50, "transition frequency"), positive("Omega", 1, "drive strength"),
                real_any("Delta", 0, "drive detuning omega - epsilon"), positive("t_max", 10, "final time"),
                integer("n_t", 401, 2, 1000000, "time samples")},
               run_rabi});
  r.push_back({"collapse-revival",
               "Jaynes-Cummings atom in a coherent field: collapse and revival of p_e",
               {"p_e(t) = 1/2 - 1/2 sum_n P(n) cos(2 sqrt(n) g t)", "collapse rate g/sqrt(2)",
                "revival times pi m sqrt(nbar)/g"},
               {positive("nbar", 100, "mean photon number"), positive("g", 1, "coupling"),
                positive("t_max", 250, "final time in units of 1/g"), integer("n_t", 2501, 2, 1000000, "time samples")},
               run_collapse});
  r.push_back({"pdc-instability",
               "degenerate parametric down-conversion from vacuum in the stable and unstable phases",
               {"n(t) = g^2/(Delta^2 - g^2) sin^2(Omega t) for |Delta| > g",
                "n(t) = g^2/(g^2 - Delta^2) sinh^2(kappa t) for |Delta| < g"},
               {real_any("Delta", 2, "detuning"), nonnegative("g", 1, "pump coupling"), positive("t_max", 1, "final time"),
                integer("n_t", 101, 2, 1000000, "time samples"), integer("n_max", 60, 2, 2000, "Fock cutoff")},
               run_pdc});
  r.push_back({"driven-cavity",
               "coherently driven damped cavity: master equation against the moment solution",
               {"<a>_ss = E/(gamma - i Delta)", "n_ss = |E|^2/(gamma^2 + Delta^2) + nbar"},
               {positive("gamma", 1, "amplitude decay rate"), real_any("Delta", 0, "laser detuning"),
                real_any("E_re", 1, "drive amplitude, real part"), real_any("E_im", 0, "drive amplitude, imaginary part"),
                nonnegative("nbar", 0, "bath occupation"), integer("n_max", 20, 1, 400, "Fock cutoff"),
                positive("t_max", 5, "final time"), integer("n_t", 101, 2, 100000, "time samples")},
               run_driven_cavity});
  r.push_back({"spontaneous-emission",
               "decay of an excited atom: master equation, closed form and quantum jumps",
               {"p_e(t) = e^{-2 gamma t} at zero temperature", "maximally mixed at t = ln 2/(2 gamma)"},
               {positive("gamma", 1, "decay rate"), nonnegative("nbar", 0, "bath occupation"),
                positive("t_max", 3, "final time"), integer("n_t", 61, 2, 100000, "time samples"),
                integer("n_traj", 2000, 0, 10000000, "quantum-jump trajectories; 0 disables")},
               run_emission});
  r.push_back({"dephasing",
               "pure dephasing of a superposition state",
               {"populations constant", "|rho_eg(t)| = 1/2 e^{-gamma_phi t/2}"},
               {positive("gamma_phi", 1, "dephasing rate"), real_any("epsilon", 0, "transition frequency"),
                positive("t_max", 5, "final time"), integer("n_t", 101, 2, 100000, "time samples")},
               run_dephasing});
  r.push_back({"thermal-g2",
               "intensity correlations of thermal cavity light from the regression theorem",
               {"g2(tau) = 1 + e^{-2 gamma tau}"},
               {positive("gamma", 1, "amplitude decay rate"), positive("nbar", 0.5, "bath occupation"),
                integer("n_max", 0, 0, 400, "Fock cutoff; 0 picks a cutoff with tail below 1e-12"),
                positive("tau_max", 5, "largest delay"), integer("n_tau", 51, 2, 100000, "delay samples")},
               run_thermal_g2});
  r.push_back({"resonance-fluorescence",
               "antibunching of resonance fluorescence from the driven Bloch system",
               {"p_e = P/(2(1 + P))", "g2(0) = 0", "g2 oscillates at 2|E| for P >> 1"},
               {nonnegative("P", 10, "saturation parameter"), positive("gamma", 1, "decay rate"),
                positive("tau_max", 10, "largest delay"), integer("n_tau", 401, 2, 1000000, "delay samples")},
               run_rf});
  r.push_back({"opo-squeezing",
               "homodyne spectra of a degenerate OPO below threshold",
               {"V0 = 1 + 4 sigma/((1 - sigma)^2 + (Omega/gamma)^2)",
                "Vpi2 = 1 - 4 sigma/((1 + sigma)^2 + (Omega/gamma)^2)", "V0 Vpi2 = 1",
                "intracavity variances gamma/(gamma - g) and gamma/(gamma + g)"},
               {positive("gamma", 1, "amplitude decay rate"),
                real_range("sigma", 0.5, 0, 1, false, true, "pump parameter g/gamma"),
                positive("Omega_max", 10, "largest frequency in units of gamma"),
                integer("n_Omega", 101, 2, 100000, "frequency samples")},
               run_opo_squeezing});
  r.push_back({"opo-g2",
               "photon correlations of a degenerate OPO below threshold",
               {"G2(tau) from the linearized moments against the master-equation regression"},
               {positive("gamma", 1, "amplitude decay rate"),
                real_range("sigma", 0.3, 0, 1, false, true, "pump parameter g/gamma"),
                integer("n_max", 40, 2, 200, "Fock cutoff"), positive("tau_max", 5, "largest delay"),
                integer("n_tau", 51, 2, 100000, "delay samples")},
               run_opo_g2});
  r.push_back({"purcell-cooling",
               "atom coupled to a lossy cavity: full model against the adiabatically eliminated one",
               {"Gamma_eff = gamma + 2 g^2 kappa/(kappa^2 + Delta^2)", "nbar_eff = gamma nbar/Gamma_eff"},
               {positive("gamma", 1, "atomic decay rate"), positive("g", 10, "coupling in units of gamma"),
                positive("kappa", 100, "cavity decay in units of g"), real_any("Delta", 0, "cavity detuning"),
                nonnegative("nbar", 1, "atomic bath occupation"), integer("n_max", 4, 1, 40, "Fock cutoff"),
                positive("t_max", 3, "final time in units of 1/gamma"), integer("n_t", 61, 2, 100000, "time samples"),
                choice("initial", "excited", {"excited", "thermal"}, "initial atomic state")},
               run_purcell});
  {
    auto ps = std::vector<ParamSpec>{
        choice("state", "fock", {"fock", "coherent", "squeezed", "thermal", "cat"}, "state family"),
        integer("n", 1, 0, 200, "Fock number"),
        real_any("alpha_re", 1.5, "coherent amplitude, real part"),
        real_any("alpha_im", 0, "coherent amplitude, imaginary part"),
        nonnegative("r", 0.5, "squeezing strength"),
        real_any("theta", 0, "squeezing angle"),
        nonnegative("nbar", 0.5, "thermal occupation"),
        integer("n_max", 0, 0, 400, "Fock cutoff; 0 picks one from the state")};
    for (auto& g : grid_params()) ps.push_back(g);
    r.push_back({"wigner-gallery",
                 "Wigner functions of Fock, coherent, squeezed, thermal and cat states",
                 {"W_n(x, p) = (-1)^n/(2 pi) e^{-(x^2 + p^2)/2} L_n(x^2 + p^2)", "Gaussian W from (d, V)",
                  "integral of W equals 1"},
                 ps, run_wigner_gallery});
  }
  {
    auto ps = std::vector<ParamSpec>{positive("g", 1, "Kerr strength"), real_any("alpha_re", 2, "amplitude, real part"),
                                     real_any("alpha_im", 0, "amplitude, imaginary part"),
                                     integer("n_max", 0, 0, 400, "Fock cutoff; 0 picks one from alpha")};
    for (auto& g : grid_params()) ps.push_back(g);
    r.push_back({"kerr-cat",
                 "coherent state under a Kerr Hamiltonian g N^2 at t = pi/(2g)",
                 {"e^{-i pi N^2/2}|alpha> = ((1 - i)|alpha> + (1 + i)|-alpha>)/2"},
                 ps, run_kerr_cat});
  }
  r.push_back({"optomech-cooling",
               "sideband cooling of a mechanical mode versus laser detuning",
               {"nbar_eff floor kappa^2/(4 Omega^2)", "Gamma_eff = gamma C at Delta = -Omega"},
               {positive("g", 0.3, "optomechanical coupling"), positive("kappa", 1, "cavity decay"),
                positive("gamma", 1e-4, "mechanical damping"), positive("Omega_m", 10, "mechanical frequency"),
                nonnegative("nbar", 100, "mechanical bath occupation"),
                real_any("Delta_min", -2, "first detuning in units of Omega_m"),
                real_any("Delta_max", -0.25, "last detuning in units of Omega_m"),
                integer("n_Delta", 101, 1, 100000, "detuning samples")},
               run_optomech});
  return r;
}

}  // namespace

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> r = build_registry();
  return r;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw ConfigError("scenario: unknown scenario '" + name + "'");
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ScenarioConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "scenario") {
      if (!v.is_string()) throw ConfigError("scenario: must be a string");
      c.scenario = v.get<std::string>();
    } else if (k == "params") {
      if (!v.is_object()) throw ConfigError("params: must be an object");
      c.params = v;
    } else if (k == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("seed: must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (k == "output") {
      if (!v.is_object()) throw ConfigError("output: must be an object");
      for (auto o = v.begin(); o != v.end(); ++o) {
        if (o.key() == "path") {
          if (!o.value().is_string()) throw ConfigError("output.path: must be a string");
          c.out_path = o.value().get<std::string>();
        } else if (o.key() == "format") {
          const json& f = o.value();
          if (!f.is_string() || (f != "csv" && f != "json")) throw ConfigError("output.format: must be \"csv\" or \"json\"");
          c.format = f.get<std::string>();
        } else {
          throw ConfigError("output." + o.key() + ": unknown key");
        }
      }
    } else {
      throw ConfigError(k + ": unknown key");
    }
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

Params resolve_params(const Scenario& s, const json& overrides) {
  if (!overrides.is_object()) throw ConfigError("params: must be an object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    const bool known = std::any_of(s.params.begin(), s.params.end(), [&](const ParamSpec& p) { return p.name == it.key(); });
    if (!known) throw ConfigError("params." + it.key() + ": unknown parameter for scenario " + s.name);
  }
  json out = json::object();
  for (const auto& ps : s.params) {
    const std::string field = "params." + ps.name;
    const json v = overrides.contains(ps.name) ? overrides.at(ps.name) : ps.default_value;
    switch (ps.kind) {
      case Kind::Real: {
        if (!v.is_number()) throw ConfigError(field + ": must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field + ": must be finite");
        const bool lo_ok = ps.lo_open ? x > ps.lo : x >= ps.lo;
        const bool hi_ok = ps.hi_open ? x < ps.hi : x <= ps.hi;
        if (!lo_ok || !hi_ok)
          throw ConfigError(field + ": " + format_double(x) + " outside " + (ps.lo_open ? "(" : "[") +
                            (std::isfinite(ps.lo) ? format_double(ps.lo) : "-inf") + ", " +
                            (std::isfinite(ps.hi) ? format_double(ps.hi) : "inf") + (ps.hi_open ? ")" : "]"));
        out[ps.name] = x;
        break;
      }
      case Kind::Integer: {
        if (!v.is_number_integer()) throw ConfigError(field + ": must be an integer");
        const auto x = v.get<long long>();
        if (x < ps.lo || x > ps.hi)
          throw ConfigError(field + ": " + std::to_string(x) + " outside [" + std::to_string((long long)ps.lo) +
                            ", " + std::to_string((long long)ps.hi) + "]");
        out[ps.name] = static_cast<int>(x);
        break;
      }
      case Kind::Text: {
        if (!v.is_string()) throw ConfigError(field + ": must be a string");
        const auto x = v.get<std::string>();
        if (std::find(ps.choices.begin(), ps.choices.end(), x) == ps.choices.end()) {
          std::string opts;
          for (const auto& c : ps.choices) opts += (opts.empty() ? "" : ", ") + c;
          throw ConfigError(field + ": '" + x + "' is not one of " + opts);
        }
        out[ps.name] = x;
        break;
      }
    }
  }
  return Params(std::move(out));
}

namespace {

SeriesArtifact run_with_seed(const ScenarioConfig& cfg, std::uint64_t seed, int threads) {
  const Scenario& s = find_scenario(cfg.scenario);
  const Params p = resolve_params(s, cfg.params);
  SeriesArtifact a = s.run(p, RunContext{seed, threads});
  a.validate();
  json body = std::move(a.metadata);
  a.metadata = {{"scenario", s.name},
                {"params", p.values()},
                {"toolkit_version", kToolkitVersion},
                {"anchors", s.anchors},
                {"seed", seed},
                {"warnings", body["report"]["warnings"]},
                {"notes", body["report"]["notes"]},
                {"results", body["results"]}};
  return a;
}

}  // namespace

SeriesArtifact run_scenario(const ScenarioConfig& cfg, int threads) {
  return run_with_seed(cfg, cfg.seed.value_or(1), std::max(1, threads));
}

std::vector<SeriesArtifact> sweep(const ScenarioConfig& cfg, const std::string& param, const std::vector<json>& values,
                                  int threads) {
  const Scenario& s = find_scenario(cfg.scenario);
  if (std::none_of(s.params.begin(), s.params.end(), [&](const ParamSpec& p) { return p.name == param; }))
    throw ConfigError("sweep: unknown parameter '" + param + "' for scenario " + s.name);
  const std::size_t n = values.size();
  std::vector<ScenarioConfig> cfgs(n, cfg);
  for (std::size_t i = 0; i < n; ++i) {
    cfgs[i].params[param] = values[i];
    resolve_params(s, cfgs[i].params);  // fail fast before any work starts
  }
  std::vector<std::optional<SeriesArtifact>> out(n);
  std::vector<std::exception_ptr> errs(n);
  const std::uint64_t base = cfg.seed.value_or(1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = run_with_seed(cfgs[i], base + i, 1);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<SeriesArtifact> res;
  for (std::size_t i = 0; i < n; ++i) {
    if (errs[i]) std::rethrow_exception(errs[i]);
    res.push_back(std::move(*out[i]));
  }
  return res;
}

PhysicalParams physical_params(double T, double L, double P_inj, double omega_c, double phase) {
  constexpr double c = 299792458.0;
  constexpr double hbar = 1.054571817e-34;
  if (!(T > 0)) throw InvalidArgument("physical_params: T must be > 0");
  if (T >= 0.5) throw InvalidArgument("physical_params: T >= 0.5 is outside the weak-transmission model");
  if (!(L > 0)) throw InvalidArgument("physical_params: L must be > 0");
  if (!(P_inj >= 0)) throw InvalidArgument("physical_params: P_inj must be >= 0");
  if (!(omega_c > 0)) throw InvalidArgument("physical_params: omega_c must be > 0");
  if (!std::isfinite(phase)) throw InvalidArgument("physical_params: phase must be finite");
  const double gamma = c * T / (4 * L);
  return {gamma, std::polar(std::sqrt(2 * gamma * P_inj / (hbar * omega_c)), phase)};
}

}  // namespace qo
