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

#include "qoptics/open_dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "qoptics/ode.hpp"

namespace qo {

void LindbladModel::validate(const Tolerances& tol) const {
  require(H.basis == basis, "LindbladModel: Hamiltonian basis " + H.basis.describe() + " differs from " +
                                basis.describe());
  if (!is_hermitian(H.m, tol.herm))
    throw InvalidArgument("LindbladModel: H not Hermitian (residual " + std::to_string(hermiticity_residual(H.m)) +
                          ")");
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    require(jumps[k].J.basis == basis, "LindbladModel: jump " + std::to_string(k) + " has a different basis");
    require(std::isfinite(jumps[k].kappa) && jumps[k].kappa >= 0,
            "LindbladModel: jump " + std::to_string(k) + " has negative or non-finite rate");
  }
  for (const auto& d : drives) require(d.op.basis == basis, "LindbladModel: drive basis mismatch");
}

bool LindbladModel::time_dependent() const {
  for (const auto& d : drives)
    if (d.frequency != 0.0 && d.amplitude != 0.0) return true;
  return false;
}

Operator LindbladModel::static_hamiltonian() const {
  require(!time_dependent(), "model has rotating drives; transform to a frame where they are static");
  CMat h = H.m;
  for (const auto& d : drives) h += I * (d.amplitude * d.op.m - std::conj(d.amplitude) * d.op.m.adjoint());
  return {basis, h};
}

CMat LindbladModel::hamiltonian_at(double t) const {
  CMat h = H.m;
  for (const auto& d : drives) {
    const cplx e = d.amplitude * std::exp(-I * d.frequency * t);
    h += I * (e * d.op.m - std::conj(e) * d.op.m.adjoint());
  }
  return h;
}

Superoperator build_liouvillian(const LindbladModel& m, const Tolerances& tol) {
  m.validate(tol);
  const int d = m.basis.total_dim();
  const CMat Id = CMat::Identity(d, d);
  const CMat H = m.static_hamiltonian().m;
  CMat L = -I * (kron(Id, H) - kron(H.transpose(), Id));
  for (const auto& j : m.jumps) {
    if (j.kappa == 0) continue;
    const CMat JdJ = j.J.m.adjoint() * j.J.m;
    L += j.kappa * (2.0 * kron(j.J.m.conjugate(), j.J.m) - kron(Id, JdJ) - kron(JdJ.transpose(), Id));
  }
  return {L, d};
}

namespace {

struct DirectRhs {
  CMat Hnh;  // H - i sum kappa J^dag J  (static part)
  std::vector<std::pair<double, CMat>> jumps;
  const LindbladModel* model;
  bool td;

  explicit DirectRhs(const LindbladModel& m) : model(&m), td(m.time_dependent()) {
    const int d = m.basis.total_dim();
    Hnh = td ? m.H.m : m.static_hamiltonian().m;
    CMat decay = CMat::Zero(d, d);
    for (const auto& j : m.jumps) {
      if (j.kappa == 0) continue;
      decay += j.kappa * j.J.m.adjoint() * j.J.m;
      jumps.emplace_back(j.kappa, j.J.m);
    }
    Hnh -= I * decay;
  }

  CMat operator()(double t, const CMat& rho) const {
    CMat h = Hnh;
    if (td) h += model->hamiltonian_at(t) - model->H.m;
    CMat out = -I * (h * rho - rho * h.adjoint());
    for (const auto& [k, J] : jumps) out.noalias() += (2.0 * k) * (J * rho * J.adjoint());
    return out;
  }
};

}  // namespace

CMat apply_lindblad(const LindbladModel& m, const CMat& rho, double t) { return DirectRhs(m)(t, rho); }

Operator adjoint_lindblad(const LindbladModel& m, const Operator& A) {
  const Operator H = m.static_hamiltonian();
  CMat out = I * (H.m * A.m - A.m * H.m);
  for (const auto& j : m.jumps) {
    const CMat& J = j.J.m;
    const CMat JdJ = J.adjoint() * J;
    out += j.kappa * (2.0 * J.adjoint() * A.m * J - JdJ * A.m - A.m * JdJ);
  }
  return {m.basis, out};
}

std::vector<CMat> propagate_operator(const CMat& Y0, const LindbladModel& m, const std::vector<double>& t_grid,
                                     const Settings& s) {
  m.validate(s.tol);
  const int d = m.basis.total_dim();
  std::vector<CMat> out;
  if (t_grid.empty()) return out;
  if (!m.time_dependent() && d <= s.exp_threshold_dim) {
    const Superoperator L = build_liouvillian(m, s.tol);
    std::map<double, CMat> cache;
    CVec v = vec(Y0);
    out.push_back(Y0);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double dt = t_grid[i] - t_grid[i - 1];
      require(dt >= 0, "time grid must be non-decreasing");
      auto it = cache.find(dt);
      if (it == cache.end()) it = cache.emplace(dt, expm(CMat(L.L * dt)).value).first;
      v = it->second * v;
      out.push_back(unvec(v, d));
    }
    return out;
  }
  OdeOptions opt;
  opt.rtol = s.ode_rtol;
  opt.atol = s.ode_atol;
  DirectRhs rhs(m);
  return dopri5(rhs, Y0, t_grid, opt);
}

MasterSeries evolve_master(const DensityMatrix& rho0, const LindbladModel& m, const std::vector<double>& t_grid,
                           const Settings& s, Report* report) {
  require(rho0.basis == m.basis, "evolve_master: state basis differs from model basis");
  if (auto v = density_violation(rho0.rho, s.tol)) throw InvalidArgument("evolve_master: initial state " + *v);
  const int d = m.basis.total_dim();
  const PropagationMethod method = (!m.time_dependent() && d <= s.exp_threshold_dim)
                                       ? PropagationMethod::MatrixExponential
                                       : PropagationMethod::AdaptiveOde;
  if (report)
    report->note(std::string("evolve_master: ") +
                 (method == PropagationMethod::MatrixExponential ? "matrix exponential" : "adaptive ODE") +
                 " propagation, dim " + std::to_string(d));
  const std::vector<CMat> traj = propagate_operator(rho0.rho, m, t_grid, s);
  Tolerances check = s.tol;
  check.trace = std::max(check.trace, 1e-9);
  check.herm = std::max(check.herm, 1e-9);
  MasterSeries out{t_grid, {}, method};
  out.rho.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (auto v = density_violation(traj[i], check))
      throw NumericError("evolve_master: invariant violated at t = " + std::to_string(t_grid[i]) + ": " + *v);
    out.rho.push_back({m.basis, traj[i], rho0.leakage});
  }
  return out;
}

DensityMatrix steady_state(const LindbladModel& m, const Settings& s) {
  const Superoperator S = build_liouvillian(m, s.tol);
  const int d = S.dim;
  CMat A = S.L;
  A.row(0).setZero();
  for (int i = 0; i < d; ++i) A(0, i + i * d) = 1.0;
  CVec rhs = CVec::Zero(d * d);
  rhs(0) = 1.0;
  Eigen::PartialPivLU<CMat> lu(A);
  const double rc = lu.rcond();
  const auto piv = lu.matrixLU().diagonal().cwiseAbs();
  if (!(rc > 1e-14) || !(piv.minCoeff() > 1e-13 * piv.maxCoeff())) {
    Eigen::FullPivLU<CMat> full(S.L);
    full.setThreshold(1e-10);
    throw NumericError("steady_state: null space of L is degenerate (dimension " +
                       std::to_string(full.dimensionOfKernel()) + ", rcond " + std::to_string(rc) + ")");
  }
  CVec x = lu.solve(rhs);
  CMat rho = unvec(x, d);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  const double res = (S.L * vec(rho)).norm();
  const double Lnorm = S.L.norm();
  if (!std::isfinite(res) || res > 1e-9 * Lnorm)
    throw NumericError("steady_state: residual " + std::to_string(res) + " exceeds 1e-9 ||L||");
  if (auto v = density_violation(rho, s.tol)) throw NumericError("steady_state: " + *v);
  return {m.basis, rho, 0.0};
}

cplx moment_rhs(const Operator& A, const LindbladModel& m, const DensityMatrix& state) {
  const Operator H = m.static_hamiltonian();
  cplx r = expectation(commutator(A, H), state) / I;
  for (const auto& j : m.jumps) {
    const Operator Jd = j.J.adjoint();
    r += j.kappa * (expectation(commutator(Jd, A) * j.J, state) + expectation(Jd * commutator(A, j.J), state));
  }
  return r;
}

namespace {

// Components X = sum_q X_q with [G, X_q] = q X_q, computed in the eigenbasis of G.
std::vector<std::pair<double, CMat>> frequency_components(const CMat& X, const RVec& g, const CMat& V) {
  const CMat Xg = V.adjoint() * X * V;
  const Eigen::Index d = g.size();
  std::vector<std::pair<double, CMat>> comps;
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (Xg(i, j) == 0.0) continue;
      if (std::abs(Xg(i, j)) <= 1e-14 * std::max(1.0, Xg.cwiseAbs().maxCoeff())) continue;
      const double q = g(i) - g(j);
      auto it = std::find_if(comps.begin(), comps.end(),
                             [&](const auto& c) { return std::abs(c.first - q) <= 1e-9 * scale; });
      if (it == comps.end()) {
        comps.emplace_back(q, CMat::Zero(d, d));
        it = comps.end() - 1;
      }
      it->second(i, j) = Xg(i, j);
    }
  for (auto& c : comps) c.second = V * c.second * V.adjoint();
  return comps;
}

}  // namespace

LindbladModel frame_transform(const LindbladModel& m, const Operator& generator, double frequency,
                              const Tolerances& tol) {
  m.validate(tol);
  require(generator.basis == m.basis, "frame_transform: generator basis mismatch");
  require(is_hermitian(generator.m, tol.herm), "frame_transform: generator must be Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (generator.m + generator.m.adjoint()));
  const RVec g = es.eigenvalues();
  const CMat V = es.eigenvectors();

  LindbladModel out{m.basis, Operator::zero(m.basis), {}, {}};
  // U = e^{-i w G t}: U^dag X_q U = e^{i w q t} X_q.
  CMat Hs = -frequency * generator.m;
  for (const auto& [q, Xq] : frequency_components(m.H.m, g, V)) {
    if (std::abs(q * frequency) <= 1e-12) {
      Hs += Xq;
    } else if (q > 0) {
      // X_q e^{i w q t} + h.c. == i(amp e^{-i nu t} X_q - h.c.) with amp = -i, nu = -w q.
      out.drives.push_back({{m.basis, Xq}, cplx(0, -1), -frequency * q});
    }
  }
  out.H = {m.basis, 0.5 * (Hs + Hs.adjoint())};
  for (const auto& dr : m.drives)
    for (const auto& [q, Xq] : frequency_components(dr.op.m, g, V)) {
      const double nu = dr.frequency - frequency * q;
      out.drives.push_back({{m.basis, Xq}, dr.amplitude, std::abs(nu) <= 1e-12 ? 0.0 : nu});
    }
  for (const auto& j : m.jumps) {
    const auto comps = frequency_components(j.J.m, g, V);
    if (comps.size() > 1 && frequency != 0)
      throw InvalidArgument("frame_transform: a jump operator mixes frame frequencies; dissipator would rotate");
    out.jumps.push_back(j);
  }
  return out;
}

void CavityParams::validate() const {
  require(std::isfinite(gamma) && gamma > 0, "CavityParams: gamma must be > 0");
  require(std::isfinite(nbar) && nbar >= 0, "CavityParams: nbar must be >= 0");
  require(std::isfinite(Delta) && std::isfinite(E.real()) && std::isfinite(E.imag()),
          "CavityParams: non-finite Delta or E");
}

LindbladModel cavity_model(const CavityParams& p, int n_max) {
  p.validate();
  const FockOps f = fock_ops(n_max);
  const Operator H = (-p.Delta) * f.N + I * (p.E * f.a_dag - std::conj(p.E) * f.a);
  LindbladModel m{f.a.basis, H, {{p.gamma * (p.nbar + 1), f.a}}, {}};
  if (p.nbar > 0) m.jumps.push_back({p.gamma * p.nbar, f.a_dag});
  return m;
}

LindbladModel cavity_model_lab(const CavityParams& p, int n_max) {
  p.validate();
  const FockOps f = fock_ops(n_max);
  LindbladModel m{f.a.basis, p.omega_c * f.N, {{p.gamma * (p.nbar + 1), f.a}}, {}};
  if (p.nbar > 0) m.jumps.push_back({p.gamma * p.nbar, f.a_dag});
  m.drives.push_back({f.a_dag, p.E, p.omega_c + p.Delta});
  return m;
}

cplx driven_cavity_steady_mean(const CavityParams& p) { return p.E / cplx(p.gamma, -p.Delta); }

CavityMoments driven_cavity_analytic(const CavityParams& p, const CavityMoments& init, double t) {
  p.validate();
  const cplx z = cplx(p.gamma, -p.Delta);
  const cplx ass = driven_cavity_steady_mean(p);
  const double e2 = std::exp(-2 * p.gamma * t);
  return {ass + (init.mean_a - ass) * std::exp(-z * t), std::exp(-2.0 * z * t) * init.var_a,
          e2 * init.n_fluct + p.nbar * (1 - e2)};
}

LindbladModel atom_model(double gamma, double nbar, double epsilon) {
  require(gamma >= 0 && nbar >= 0, "atom_model: rates must be >= 0");
  const PauliOps s = pauli_ops();
  LindbladModel m{s.sz.basis, (0.5 * epsilon) * s.sz, {{gamma * (nbar + 1), s.sm}}, {}};
  if (nbar > 0) m.jumps.push_back({gamma * nbar, s.sp});
  return m;
}

LindbladModel dephasing_model(double gamma_phi, double epsilon) {
  require(gamma_phi >= 0, "dephasing_model: gamma_phi must be >= 0");
  const PauliOps s = pauli_ops();
  return {s.sz.basis, (0.5 * epsilon) * s.sz, {{gamma_phi / 8.0, s.sz}}, {}};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace {

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

struct ChunkResult {
  RMat pop;
  CMat obs;
  std::vector<TrajectoryRecord> records;
};

}  // namespace

McwfResult mcwf_evolve(const KetState& psi0, const LindbladModel& m, const std::vector<double>& t_grid, int n_traj,
                       std::uint64_t seed, const McwfOptions& opt) {
  m.validate();
  require(psi0.basis == m.basis, "mcwf_evolve: state basis differs from model basis");
  require(std::abs(psi0.amp.norm() - 1.0) <= 1e-10, "mcwf_evolve: initial state not normalized");
  require(n_traj >= 1, "mcwf_evolve: need at least one trajectory");
  require(!t_grid.empty(), "mcwf_evolve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) require(t_grid[i] >= t_grid[i - 1], "mcwf_evolve: unsorted grid");
  require(opt.p_max > 0 && opt.p_max < 0.1, "mcwf_evolve: p_max must lie in (0, 0.1)");
  require(opt.chunk >= 1, "mcwf_evolve: chunk must be >= 1");
  for (const auto& o : opt.observables) require(o.basis == m.basis, "mcwf_evolve: observable basis mismatch");

  const int d = m.basis.total_dim();
  std::vector<std::pair<double, CMat>> jumps;
  double rate_bound = 0;
  CMat decay = CMat::Zero(d, d);
  for (const auto& j : m.jumps) {
    if (j.kappa == 0) continue;
    const CMat JdJ = j.J.m.adjoint() * j.J.m;
    Eigen::SelfAdjointEigenSolver<CMat> es(JdJ, Eigen::EigenvaluesOnly);
    rate_bound += 2 * j.kappa * es.eigenvalues().maxCoeff();
    decay += j.kappa * JdJ;
    jumps.emplace_back(j.kappa, j.J.m);
  }
  double dt_max = opt.dt;
  if (dt_max <= 0) {
    dt_max = rate_bound > 0 ? opt.p_max / rate_bound : std::numeric_limits<double>::infinity();
    const double hn = m.hamiltonian_at(0.0).norm() + decay.norm();
    if (hn > 0) dt_max = std::min(dt_max, 0.01 / hn);
    if (!std::isfinite(dt_max)) dt_max = 1e-3 * std::max(1.0, t_grid.back() - t_grid.front());
  }
  if (rate_bound * dt_max >= 0.1)
    throw InvalidArgument("mcwf_evolve: dt too large, jump probability bound " + std::to_string(rate_bound * dt_max));

  // Substeps per output interval, fixed before any randomness is drawn.
  std::vector<int> nsub(t_grid.size(), 0);
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    nsub[i] = std::max(1, static_cast<int>(std::ceil((t_grid[i] - t_grid[i - 1]) / dt_max - 1e-12)));

  const int nt = static_cast<int>(t_grid.size());
  const int nobs = static_cast<int>(opt.observables.size());
  const int n_chunks = (n_traj + opt.chunk - 1) / opt.chunk;
  std::vector<ChunkResult> results(n_chunks);
  const CMat Hstatic = m.time_dependent() ? m.H.m : m.static_hamiltonian().m;
  const bool td = m.time_dependent();

  auto run_chunk = [&](int c) {
    ChunkResult r{RMat::Zero(nt, d), CMat::Zero(nt, nobs), {}};
    std::mt19937_64 gen(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(c) + 1)));
    const int first = c * opt.chunk;
    const int last = std::min(n_traj, first + opt.chunk);
    CVec w(d);
    for (int k = first; k < last; ++k) {
      TrajectoryRecord rec;
      CVec psi = psi0.amp;
      auto record = [&](int ti) {
        r.pop.row(ti) += psi.cwiseAbs2().transpose();
        for (int o = 0; o < nobs; ++o) r.obs(ti, o) += psi.dot(opt.observables[o].m * psi);
      };
      record(0);
      double t = t_grid[0];
      for (int ti = 1; ti < nt; ++ti) {
        const double h = (t_grid[ti] - t_grid[ti - 1]) / nsub[ti];
        for (int st = 0; st < nsub[ti]; ++st) {
          double ptot = 0;
          std::vector<double> pj(jumps.size());
          for (std::size_t j = 0; j < jumps.size(); ++j) {
            pj[j] = 2 * jumps[j].first * h * (jumps[j].second * psi).squaredNorm();
            ptot += pj[j];
          }
          if (ptot >= 0.1) throw NumericError("mcwf_evolve: jump probability " + std::to_string(ptot) + " >= 0.1");
          const double u = uniform01(gen);
          if (u < ptot) {
            const double v = uniform01(gen) * ptot;
            std::size_t ch = 0;
            double acc = pj[0];
            while (ch + 1 < jumps.size() && v >= acc) acc += pj[++ch];
            w = jumps[ch].second * psi;
            psi = w / w.norm();
            if (opt.keep_records) {
              rec.jump_times.push_back(t + h);
              rec.channels.push_back(static_cast<int>(ch));
            }
          } else {
            const CMat Hh = td ? CMat(m.hamiltonian_at(t)) : Hstatic;
            w = psi - I * h * (Hh * psi) - h * (decay * psi);
            psi = w / w.norm();
          }
          t += h;
        }
        t = t_grid[ti];
        record(ti);
      }
      if (opt.keep_records) r.records.push_back(std::move(rec));
    }
    results[c] = std::move(r);
  };

  const int nth = std::max(1, std::min(opt.threads, n_chunks));
  if (nth == 1) {
    for (int c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nth);
    for (int w = 0; w < nth; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int c = next++; c < n_chunks; c = next++) run_chunk(c);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  McwfResult out{t_grid, RMat::Zero(nt, d), CMat::Zero(nt, nobs), {}, dt_max, rate_bound * dt_max};
  for (auto& r : results) {
    out.populations += r.pop;
    out.observables += r.obs;
    for (auto& rec : r.records) out.bundle.push_back(std::move(rec));
  }
  out.populations /= n_traj;
  out.observables /= static_cast<double>(n_traj);
  return out;
}

LangevinSteady langevin_steady(const LangevinLinearModel& m) {
  const Eigen::Index n = m.A.rows();
  require(m.A.cols() == n && m.D.rows() == n && m.D.cols() == n, "langevin_steady: dimension mismatch");
  Eigen::ComplexEigenSolver<CMat> es(m.A, false);
  const double maxre = es.eigenvalues().real().maxCoeff();
  if (!(maxre < 0)) throw NumericError("langevin_steady: drift matrix not Hurwitz (max Re eigenvalue " +
                                       std::to_string(maxre) + ")");
  CVec mean = CVec::Zero(n);
  if (m.drive.size() == n) mean = -m.A.partialPivLu().solve(m.drive);
  return {mean, lyapunov_transpose<cplx>(m.A, m.D)};
}

LangevinLinearModel cavity_langevin(const CavityParams& p) {
  p.validate();
  CMat A = CMat::Zero(2, 2), D = CMat::Zero(2, 2);
  A(0, 0) = -cplx(p.gamma, -p.Delta);
  A(1, 1) = -cplx(p.gamma, p.Delta);
  D(0, 1) = 2 * p.gamma * (p.nbar + 1);
  D(1, 0) = 2 * p.gamma * p.nbar;
  CVec drive(2);
  drive << p.E, std::conj(p.E);
  return {A, D, drive};
}

LangevinLinearModel opo_langevin(double gamma, double g, double Delta, double nbar) {
  require(gamma > 0 && g >= 0 && nbar >= 0, "opo_langevin: need gamma > 0, g >= 0, nbar >= 0");
  CMat A(2, 2), D = CMat::Zero(2, 2);
  A << -cplx(gamma, Delta), g, g, -cplx(gamma, -Delta);
  D(0, 1) = 2 * gamma * (nbar + 1);
  D(1, 0) = 2 * gamma * nbar;
  return {A, D, CVec::Zero(2)};
}

LindbladModel opo_model(double gamma, double g, int n_max, double Delta) {
  require(gamma > 0 && g >= 0, "opo_model: need gamma > 0, g >= 0");
  const FockOps f = fock_ops(n_max);
  const Operator a2 = f.a * f.a;
  const Operator H = Delta * f.N + cplx(0, 0.5 * g) * (a2.adjoint() - a2);
  return {f.a.basis, H, {{gamma, f.a}}, {}};
}

}  // namespace qo
