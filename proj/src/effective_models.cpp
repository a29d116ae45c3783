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

#include "qoptics/effective_models.hpp"

#include <algorithm>
#include <cmath>

#include "qoptics/linalg.hpp"

namespace qo {

ProjectorPair ProjectorPair::checked(const Operator& P, const Tolerances& tol) {
  const double scale = std::max(1.0, P.m.norm());
  require(is_hermitian(P.m, tol.herm), "ProjectorPair: P must be Hermitian");
  const double idem = (P.m * P.m - P.m).norm();
  if (idem > tol.herm * scale)
    throw InvalidArgument("ProjectorPair: P^2 != P (residual " + std::to_string(idem) + ")");
  return {P};
}

namespace {

// Orthonormal columns spanning the eigenvalue-1 (want_one) or eigenvalue-0 subspace of a projector.
CMat projector_range(const CMat& P, bool want_one) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (P + P.adjoint()));
  std::vector<int> idx;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if ((es.eigenvalues()(i) > 0.5) == want_one) idx.push_back(i);
  CMat U(P.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) U.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(idx[j]);
  return U;
}

struct SubspaceEigen {
  RVec E;
  CMat B;  // columns: eigenvectors of H0 inside the subspace
};

SubspaceEigen diagonalize_in(const CMat& H0, const CMat& U) {
  if (U.cols() == 0) return {RVec(0), CMat(H0.rows(), 0)};
  const CMat h = U.adjoint() * H0 * U;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
  return {es.eigenvalues(), U * es.eigenvectors()};
}

}  // namespace

EffectiveHamiltonian effective_hamiltonian_2nd(const Operator& H0, const Operator& H1, const ProjectorPair& P,
                                               double t_horizon, const Tolerances& tol) {
  require(H0.basis == H1.basis && H0.basis == P.P.basis, "effective_hamiltonian_2nd: basis mismatch");
  require(is_hermitian(H0.m, tol.herm) && is_hermitian(H1.m, tol.herm),
          "effective_hamiltonian_2nd: H0 and H1 must be Hermitian");
  ProjectorPair::checked(P.P, tol);
  const double scale = std::max({1.0, H0.m.norm(), H1.m.norm()});
  const double comm = (P.P.m * H0.m - H0.m * P.P.m).norm();
  if (comm > tol.herm * scale)
    throw InvalidArgument("effective_hamiltonian_2nd: [P, H0] != 0 (residual " + std::to_string(comm) + ")");

  CMat h0 = H0.m, h1 = H1.m;
  const CMat PH1P = P.P.m * h1 * P.P.m;
  const bool split = PH1P.norm() > tol.herm * scale;
  if (split) {
    h0 += PH1P;
    h1 -= PH1P;
  }
  const SubspaceEigen sp = diagonalize_in(h0, projector_range(P.P.m, true));
  const SubspaceEigen sq = diagonalize_in(h0, projector_range(P.P.m, false));
  const CMat G = sq.B.adjoint() * h1 * sp.B;  // <k|H1|p>
  const Eigen::Index np = sp.E.size(), nq = sq.E.size();

  CMat M = CMat::Zero(np, np), T = CMat::Zero(np, np);
  RMat Tb = RMat::Zero(np, np);
  for (Eigen::Index p = 0; p < np; ++p)
    for (Eigen::Index q = 0; q < np; ++q)
      for (Eigen::Index k = 0; k < nq; ++k) {
        const cplx c = std::conj(G(k, p)) * G(k, q);
        if (c == 0.0) continue;
        const double w = sq.E(k) - sp.E(q);
        if (std::abs(w) <= 1e-12 * scale)
          throw NumericError("effective_hamiltonian_2nd: resonant intermediate level (energy gap " +
                             std::to_string(w) + ")");
        M(p, q) -= c / w;
        T(p, q) += c * std::exp(-I * w * t_horizon) / w;
        Tb(p, q) += std::abs(c) / std::abs(w);
      }
  // Non-degenerate P levels make M slightly non-Hermitian; keep its Hermitian part and report the rest.
  const CMat Mh = 0.5 * (M + M.adjoint());
  const CMat Heff = P.P.m * h0 * P.P.m + sp.B * Mh * sp.B.adjoint();
  const CMat Heff_t = Heff + sp.B * T * sp.B.adjoint();
  const double tail = Tb.norm();
  return {{H0.basis, Heff}, {H0.basis, Heff_t}, (M - M.adjoint()).norm() + 2 * tail, tail, split};
}

LindbladModel lindblad_from_superoperator(const Superoperator& S, const BasisSpec& basis, Report* report) {
  const int d = S.dim;
  const int d2 = d * d;
  require(basis.total_dim() == d && S.L.rows() == d2 && S.L.cols() == d2,
          "lindblad_from_superoperator: dimension mismatch");
  // chi((a,c),(b,e)) = L((a,b),(c,e)), so that L[rho] = sum chi F_alpha rho F_beta^dag in any operator basis.
  CMat chi(d2, d2);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) chi(a + c * d, b + e * d) = S.L(a + b * d, c + e * d);

  // Orthonormal operator basis with F_0 = I / sqrt(d).
  CMat start = CMat::Identity(d2, d2);
  CVec v0 = vec(CMat(CMat::Identity(d, d))) / std::sqrt(static_cast<double>(d));
  start.col(0) = v0;
  Eigen::HouseholderQR<CMat> qr(start);
  CMat U = qr.householderQ();
  U.col(0) = v0;
  const CMat chip = U.adjoint() * chi * U;

  // G = chi'_00/(2d) I + (1/sqrt d) sum chi'_{alpha 0} F_alpha; H = i (G - G^dag) / 2.
  CMat G = (chip(0, 0) / (2.0 * d)) * CMat::Identity(d, d);
  for (int al = 1; al < d2; ++al) G += (chip(al, 0) / std::sqrt(static_cast<double>(d))) * unvec(U.col(al), d);
  CMat H = 0.5 * I * (G - G.adjoint());
  H = 0.5 * (H + H.adjoint());

  const CMat kos = chip.bottomRightCorner(d2 - 1, d2 - 1);
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (kos + kos.adjoint()));
  const double thr = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  LindbladModel out{basis, {basis, H}, {}, {}};
  for (int k = d2 - 2; k >= 0; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam < -thr)
      warn_if(report, "lindblad_from_superoperator: Kossakowski eigenvalue " + std::to_string(lam) +
                          " < 0 (generator not completely positive); dropped");
    if (lam <= thr) continue;
    CMat J = CMat::Zero(d, d);
    for (int al = 1; al < d2; ++al) J += es.eigenvectors()(al - 1, k) * unvec(U.col(al), d);
    CVec jv = vec(J);
    fix_global_phase(jv);
    out.jumps.push_back({0.5 * lam, {basis, unvec(jv, d)}});
  }
  return out;
}

EffectiveMaster effective_master_2nd(const Elimination& e, const Tolerances& tol) {
  e.system.validate(tol);
  const std::size_t M = e.S.size();
  require(e.g.size() == M, "effective_master_2nd: g and S sizes differ");
  require(e.C.size() == M && e.K.size() == M, "effective_master_2nd: correlator tables must be M x M");
  for (std::size_t m = 0; m < M; ++m) {
    require(e.C[m].size() == M && e.K[m].size() == M, "effective_master_2nd: correlator tables must be M x M");
    require(e.S[m].basis == e.system.basis, "effective_master_2nd: S operator basis mismatch");
  }
  require(e.H_slow.basis == e.system.basis, "effective_master_2nd: H_slow basis mismatch");
  require(is_hermitian(e.H_slow.m, tol.herm), "effective_master_2nd: H_slow must be Hermitian");

  const int d = e.system.basis.total_dim();
  EffectiveMaster out{e.system, build_liouvillian(e.system, tol), std::numeric_limits<double>::infinity(), 0, 0, {}};
  bool any = false;
  for (std::size_t m = 0; m < M; ++m) {
    out.max_coupling = std::max(out.max_coupling, std::abs(e.g[m]) * e.S[m].m.jacobiSvd().singularValues()(0));
    for (std::size_t n = 0; n < M; ++n)
      for (const auto* corr : {&e.C[m][n], &e.K[m][n]})
        for (const auto& t : *corr) {
          require(t.rate.real() > 0, "effective_master_2nd: correlator terms must decay (Re rate > 0)");
          if (t.amplitude != 0.0 && e.g[m] != 0.0) {
            any = true;
            out.min_correlator_rate = std::min(out.min_correlator_rate, t.rate.real());
          }
        }
  }
  if (!any) {
    out.min_correlator_rate = 0;
    return out;
  }

  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (e.H_slow.m + e.H_slow.m.adjoint()));
  const RVec E = es.eigenvalues();
  const CMat V = es.eigenvectors();
  auto transform = [&](const Operator& S, const Correlator& corr) {
    CMat Se = V.adjoint() * S.m * V;
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        cplx w = 0;
        for (const auto& t : corr) w += t.amplitude / (t.rate + I * (E(k) - E(l)));
        Se(k, l) *= w;
      }
    return CMat(V * Se * V.adjoint());
  };

  const CMat Id = CMat::Identity(d, d);
  CMat T = CMat::Zero(d * d, d * d);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < M; ++n) {
      const cplx gg = e.g[m] * e.g[n];
      if (gg == 0.0) continue;
      const CMat& Sn = e.S[n].m;
      if (!e.C[m][n].empty()) {
        const CMat X = transform(e.S[m], e.C[m][n]);
        T += gg * kron(CMat(X.transpose()), Sn) + std::conj(gg) * kron(CMat(Sn.conjugate()), CMat(X.adjoint()));
      }
      if (!e.K[n][m].empty()) {
        const CMat SY = Sn * transform(e.S[m], e.K[n][m]);
        T -= gg * kron(Id, SY) + std::conj(gg) * kron(CMat(SY.conjugate()), Id);
      }
    }
  out.liouvillian.L += T;
  out.model = lindblad_from_superoperator(out.liouvillian, e.system.basis, &out.consistency);
  for (const auto& j : out.model.jumps) {
    Eigen::SelfAdjointEigenSolver<CMat> ej(j.J.m.adjoint() * j.J.m, Eigen::EigenvaluesOnly);
    out.max_effective_rate = std::max(out.max_effective_rate, 2 * j.kappa * ej.eigenvalues().maxCoeff());
  }
  if (out.min_correlator_rate < 10 * out.max_effective_rate)
    out.consistency.warn("effective_master_2nd: correlator decay " + std::to_string(out.min_correlator_rate) +
                         " not >> effective rate " + std::to_string(out.max_effective_rate));
  if (out.min_correlator_rate < 10 * out.max_coupling)
    out.consistency.warn("effective_master_2nd: correlator decay " + std::to_string(out.min_correlator_rate) +
                         " not >> coupling " + std::to_string(out.max_coupling));
  return out;
}

PurcellRates purcell_rates(double g, double kappa, double gamma, double Delta, double nbar) {
  require(kappa > 0 && gamma > 0, "purcell_rates: kappa and gamma must be > 0");
  require(nbar >= 0 && std::isfinite(g) && std::isfinite(Delta), "purcell_rates: need nbar >= 0 and finite g, Delta");
  const double C = g * g / (kappa * gamma);
  const double L = 1 + (Delta / kappa) * (Delta / kappa);
  PurcellRates r{};
  r.C = C;
  r.Gamma_minus = g * g * kappa / (kappa * kappa + Delta * Delta) + gamma * (nbar + 1);
  r.Gamma_plus = gamma * nbar;
  r.Gamma_eff = gamma * (1 + C / L);
  r.nbar_eff = nbar / (1 + C / L);
  r.delta_eps = -g * g * Delta / (kappa * kappa + Delta * Delta);
  return r;
}

Elimination purcell_elimination(double g, double kappa, double gamma, double Delta, double nbar) {
  require(kappa > 0, "purcell_elimination: kappa must be > 0");
  const LindbladModel atom = atom_model(gamma, nbar, 0.0);
  const PauliOps s = pauli_ops();
  Elimination e{atom, Operator::zero(atom.basis), {g, g}, {s.sp, s.sm}, {}, {}};
  e.C.assign(2, std::vector<Correlator>(2));
  e.K.assign(2, std::vector<Correlator>(2));
  e.C[0][1] = {{1.0, cplx(kappa, -Delta)}};
  e.K[0][1] = {{1.0, cplx(kappa, Delta)}};
  return e;
}

LindbladModel purcell_full_model(double g, double kappa, double gamma, double Delta, double nbar, int n_max) {
  require(kappa > 0 && gamma >= 0 && nbar >= 0, "purcell_full_model: invalid rates");
  const BasisSpec b = BasisSpec::product({Factor::fock(n_max), Factor::two_level()});
  const FockOps f = fock_ops(n_max);
  const PauliOps s = pauli_ops();
  const Operator a = tensor_embed(f.a, 0, b);
  const Operator sm = tensor_embed(s.sm, 1, b);
  const Operator H = Delta * (a.adjoint() * a) + g * (a * sm.adjoint() + a.adjoint() * sm);
  LindbladModel m{b, H, {{kappa, a}, {gamma * (nbar + 1), sm}}, {}};
  if (nbar > 0) m.jumps.push_back({gamma * nbar, sm.adjoint()});
  return m;
}

LindbladModel purcell_effective_model(const PurcellRates& r) {
  const PauliOps s = pauli_ops();
  LindbladModel m{s.sz.basis, (0.5 * r.delta_eps) * s.sz, {{r.Gamma_minus, s.sm}}, {}};
  if (r.Gamma_plus > 0) m.jumps.push_back({r.Gamma_plus, s.sp});
  return m;
}

OptomechRates optomech_rates(double g, double kappa, double gamma, double Delta, double Omega_m, double nbar) {
  require(kappa > 0 && gamma > 0 && Omega_m > 0, "optomech_rates: kappa, gamma, Omega_m must be > 0");
  require(nbar >= 0 && std::isfinite(g) && std::isfinite(Delta), "optomech_rates: need nbar >= 0 and finite g, Delta");
  const double g2 = g * g;
  const double dm = Delta + Omega_m, dp = Delta - Omega_m;
  OptomechRates r{};
  r.C = g2 / (gamma * kappa);
  r.Gamma_minus_opt = (g2 / kappa) / (1 + (dm / kappa) * (dm / kappa));
  r.Gamma_plus_opt = (g2 / kappa) / (1 + (dp / kappa) * (dp / kappa));
  r.dOmega_minus = g2 * dm / (kappa * kappa + dm * dm);
  r.dOmega_plus = g2 * dp / (kappa * kappa + dp * dp);
  const double Gm = gamma * (nbar + 1) + r.Gamma_minus_opt;
  const double Gp = gamma * nbar + r.Gamma_plus_opt;
  r.Gamma_eff = Gm - Gp;
  if (!(r.Gamma_eff > 0))
    throw NumericError("optomech_rates: effective damping " + std::to_string(r.Gamma_eff) +
                       " <= 0 (blue-detuned heating instability)");
  r.nbar_eff = Gp / r.Gamma_eff;
  r.Omega_eff = Omega_m + r.dOmega_minus + r.dOmega_plus;
  r.floor = kappa * kappa / (4 * Omega_m * Omega_m);
  return r;
}

std::vector<double> ww_default_k_grid(double gamma, double epsilon, double c) {
  require(gamma > 0 && epsilon > 0 && c > 0, "ww_default_k_grid: gamma, epsilon, c must be > 0");
  std::vector<double> x;
  const double inner = 100 * gamma, outer = 1e7 * gamma;
  const double lo = -std::min(epsilon, outer);
  // geometric below -inner
  std::vector<double> neg;
  for (double v = inner * 1.02; v < -lo; v *= 1.02) neg.push_back(-v);
  if (-lo > inner) neg.push_back(lo);
  std::reverse(neg.begin(), neg.end());
  x = neg;
  const double a = std::max(lo, -inner);
  const int n = static_cast<int>(std::ceil((inner - a) / (0.002 * gamma)));
  for (int i = 0; i <= n; ++i) x.push_back(a + (inner - a) * i / n);
  for (double v = inner * 1.02; v < outer; v *= 1.02) x.push_back(v);
  x.push_back(outer);
  std::vector<double> k(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) k[i] = std::max(0.0, (x[i] + epsilon) / c);
  return k;
}

namespace {

double sinc(double u) { return std::abs(u) < 1e-4 ? 1 - u * u / 6 : std::sin(u) / u; }
// (sin u - u cos u) / u^3
double filon_g(double u) {
  return std::abs(u) < 1e-3 ? 1.0 / 3 - u * u / 30 : (std::sin(u) - u * std::cos(u)) / (u * u * u);
}

}  // namespace

WWResult wigner_weisskopf(double gamma, double epsilon, const std::vector<double>& k_grid,
                          const std::vector<double>& t_grid, double c) {
  require(gamma > 0 && epsilon > 0 && c > 0, "wigner_weisskopf: gamma, epsilon, c must be > 0");
  require(k_grid.size() >= 2, "wigner_weisskopf: need at least two k points");
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    require(k_grid[i] > k_grid[i - 1], "wigner_weisskopf: k grid must be strictly increasing");
  require(k_grid.front() >= 0, "wigner_weisskopf: k grid is the k >= 0 branch");
  const double x_lo = c * k_grid.front() - epsilon, x_hi = c * k_grid.back() - epsilon;
  if (x_lo > -30 * gamma || x_hi < 30 * gamma)
    throw InvalidArgument("wigner_weisskopf: k grid must span at least +-30 gamma/c around epsilon/c");

  const double pref = std::sqrt(gamma * c / (2 * kPi));
  WWResult r{t_grid, k_grid, {}, CMat(k_grid.size(), t_grid.size()), {}, 0};
  const Eigen::Index nk = static_cast<Eigen::Index>(k_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double t = t_grid[j];
    require(t >= 0, "wigner_weisskopf: times must be >= 0");
    r.alpha.push_back(std::exp(-gamma * t));
    for (Eigen::Index i = 0; i < nk; ++i) {
      const cplx z(gamma, -(c * k_grid[i] - epsilon));
      r.beta(i, static_cast<Eigen::Index>(j)) = pref * (1.0 - std::exp(-z * t)) / z;
    }
    // |beta|^2 dk = (gamma / 2 pi) (A - B cos(x t)) / (gamma^2 + x^2) dx on each branch.
    const double A = 1 + std::exp(-2 * gamma * t), B = 2 * std::exp(-gamma * t);
    double lor = (std::atan(x_lo / gamma) + kPi / 2) + (kPi / 2 - std::atan(x_hi / gamma));  // tails, times 1/gamma
    // Filon rule for cos(x t) / (gamma^2 + x^2) with the weight linear on [x0, x1].
    auto filon = [&](double x0, double x1) {
      const double h = x1 - x0, mid = 0.5 * (x0 + x1), u = 0.5 * h * t;
      const double w0 = 1 / (gamma * gamma + x0 * x0), w1 = 1 / (gamma * gamma + x1 * x1);
      const double a = 0.5 * (w0 + w1), b = (w1 - w0) / h;
      // Interpolation error of the weight, spread uniformly over the cell.
      const double delta = (std::atan(x1 / gamma) - std::atan(x0 / gamma)) / gamma - a * h;
      return (a * h + delta) * std::cos(mid * t) * sinc(u) - b * std::sin(mid * t) * h * h * h * t * filon_g(u) / 4;
    };
    double osc = 0;
    for (Eigen::Index i = 0; i + 1 < nk; ++i) {
      const double x0 = c * k_grid[i] - epsilon, x1 = c * k_grid[i + 1] - epsilon;
      lor += std::atan(x1 / gamma) - std::atan(x0 / gamma);
      osc += filon(x0, x1);
    }
    // Oscillating part of the tails on a geometric grid out to 1e10 gamma; the remainder is below 1e-10.
    const double x_far = 1e10 * gamma;
    for (double x = x_hi; x < x_far; x *= 1.02) osc += filon(x, std::min(1.02 * x, x_far));
    for (double x = x_lo; x > -x_far; x *= 1.02) osc += filon(std::max(1.02 * x, -x_far), x);
    const double branch = gamma / (2 * kPi) * (A * lor / gamma - B * osc);
    r.norm.push_back(2 * branch);
    r.max_norm_error = std::max(r.max_norm_error, std::abs(2 * branch - (1 - std::exp(-2 * gamma * t))));
  }
  if (r.max_norm_error > 1e-3)
    throw NumericError("wigner_weisskopf: norm deficit " + std::to_string(r.max_norm_error) +
                       " > 1e-3; refine or widen the k grid");
  return r;
}

double lamb_shift_estimate(double gamma, double epsilon, double Lambda) {
  require(gamma >= 0 && epsilon > 0 && Lambda >= epsilon, "lamb_shift_estimate: need Lambda >= epsilon > 0");
  return -(gamma / kPi) * std::log(Lambda / epsilon);
}

}  // namespace qo
