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

#include "qoptics/closed_dynamics.hpp"

#include <cmath>
#include <limits>

namespace qo {

BlochVector bloch_from_density(const CMat& r) {
  require(r.rows() == 2 && r.cols() == 2, "bloch_from_density: need a 2x2 matrix");
  return {2 * r(0, 1).real(), -2 * r(0, 1).imag(), (r(0, 0) - r(1, 1)).real()};
}

CMat density_from_bloch(const BlochVector& b) {
  CMat r(2, 2);
  r << 0.5 * (1 + b(2)), 0.5 * cplx(b(0), -b(1)), 0.5 * cplx(b(0), b(1)), 0.5 * (1 - b(2));
  return r;
}

std::vector<BlochVector> integrate_bloch(const BlochVector& b0, const std::function<Eigen::Vector3d(double)>& alpha,
                                         const std::vector<double>& t_grid, const OdeOptions& opt) {
  require(b0.norm() <= 1 + 1e-10, "integrate_bloch: |b0| > 1");
  auto rhs = [&](double t, const Eigen::Vector3d& b) -> Eigen::Vector3d { return alpha(t).cross(b); };
  return dopri5(rhs, Eigen::Vector3d(b0), t_grid, opt);
}

std::function<Eigen::Vector3d(double)> rabi_drive(const RabiParams& p) {
  return [p](double t) { return Eigen::Vector3d(2 * p.Omega * std::cos(p.omega * t), 0.0, p.epsilon); };
}

RabiSolution rabi_rwa(const BlochVector& b0, double Delta, double Omega, double omega, double t) {
  require(b0.norm() <= 1 + 1e-10, "rabi_rwa: |b0| > 1");
  require(Omega >= 0, "rabi_rwa: Omega must be >= 0");
  const double OR = std::hypot(Omega, Delta);
  BlochVector r = b0;
  if (OR > 0) {
    const Eigen::Vector3d n = Eigen::Vector3d(Omega, 0.0, -Delta) / OR;
    const double c = std::cos(OR * t), s = std::sin(OR * t);
    r = b0 * c + n.cross(b0) * s + n * n.dot(b0) * (1 - c);
  }
  const cplx bs = 0.5 * cplx(r(0), -r(1));
  const cplx bl = bs * std::exp(-I * omega * t);
  return {r, BlochVector(2 * bl.real(), -2 * bl.imag(), r(2)), bs, bl};
}

double rabi_excited_population(double Delta, double Omega, double t) {
  return 0.5 * (1 + rabi_rwa(BlochVector(0, 0, -1), Delta, Omega, 0.0, t).slow(2));
}

CMat rabi_rwa_matrix(double Delta, double Omega) {
  CMat B(3, 3);
  B << Delta, 0, Omega / 2, 0, -Delta, -Omega / 2, Omega, -Omega, 0;
  return I * B;
}

DressedLevels jc_dressed(int n, const JCParams& p) {
  require(n >= 1, "jc_dressed: n must be >= 1");
  require(p.g >= 0, "jc_dressed: g must be >= 0");
  const double D = p.Delta();
  const double c = std::sqrt(static_cast<double>(n)) * p.g;
  const double On = std::sqrt(D * D + 4 * c * c);
  const double theta = 0.5 * std::arg(cplx(D, 2 * c));
  // Block in (|n,g>, |n-1,e>) is ((n-1/2) omega) I + [[D/2, -i c], [i c, -D/2]].
  CVec vp(2), vm(2);
  vp << std::cos(theta), I * std::sin(theta);
  vm << std::sin(theta), -I * std::cos(theta);
  fix_global_phase(vp);
  fix_global_phase(vm);
  const double mid = (n - 0.5) * p.omega;
  return {mid + 0.5 * On, mid - 0.5 * On, theta, On, vp, vm};
}

Operator jc_hamiltonian(const JCParams& p, int n_max) {
  const BasisSpec b = BasisSpec::product({Factor::fock(n_max), Factor::two_level()});
  const FockOps f = fock_ops(n_max);
  const PauliOps s = pauli_ops();
  const Operator a = tensor_embed(f.a, 0, b), N = tensor_embed(f.N, 0, b);
  const Operator sz = tensor_embed(s.sz, 1, b), sm = tensor_embed(s.sm, 1, b);
  return p.omega * N + (0.5 * p.epsilon) * sz + cplx(0, p.g) * (a * sm.adjoint() - a.adjoint() * sm);
}

double jc_excited_population(const CVec& cn, const JCParams& p, double t) {
  require(std::abs(cn.squaredNorm() - 1.0) <= 1e-10, "jc_excited_population: amplitudes not normalized");
  const double D = p.Delta();
  double pe = 0;
  for (Eigen::Index n = 1; n < cn.size(); ++n) {
    const double w = std::norm(cn(n));
    if (w == 0) continue;
    const double On = std::sqrt(D * D + 4.0 * n * p.g * p.g);
    const double s2 = On > 0 ? 2 * std::sqrt(static_cast<double>(n)) * p.g / On : 0.0;
    const double s = std::sin(0.5 * On * t);
    pe += w * s2 * s2 * s * s;
  }
  return pe;
}

PoissonWindow poisson_window(double nbar) {
  require(nbar > 0, "collapse_revival: nbar must be > 0");
  const double w = 10 * std::sqrt(nbar);
  const int lo = static_cast<int>(std::max(0.0, std::floor(nbar - w)));
  const int hi = static_cast<int>(std::ceil(nbar + w + 10));
  RVec P(hi - lo + 1);
  for (int n = lo; n <= hi; ++n) P(n - lo) = std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0));
  const double tail = std::abs(1.0 - P.sum());
  if (tail > 1e-12)
    throw NumericError("collapse_revival: Poisson window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "] misses mass " + std::to_string(tail));
  return {lo, hi, P, tail};
}

double collapse_revival_exact(const PoissonWindow& w, double g, double t) {
  double s = 0;
  for (int n = w.n_lo; n <= w.n_hi; ++n) s += w.weights(n - w.n_lo) * std::cos(2 * std::sqrt(static_cast<double>(n)) * g * t);
  return 0.5 - 0.5 * s;
}

namespace {

struct FineSeries {
  double dt;
  std::vector<double> t, s;  // s = p_e - 1/2
};

FineSeries fine_series(double nbar, double g, double t_max, int per_period) {
  const PoissonWindow w = poisson_window(nbar);
  const double period = kPi / (g * std::sqrt(nbar + 1.0));
  const double dt = period / per_period;
  const int n = static_cast<int>(std::ceil(t_max / dt)) + 1;
  FineSeries f{dt, std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    f.t[i] = i * dt;
    f.s[i] = collapse_revival_exact(w, g, f.t[i]) - 0.5;
  }
  return f;
}

}  // namespace

std::vector<double> measure_revivals(double nbar, double g, double t_max) {
  require(g > 0, "measure_revivals: g must be > 0");
  const int per = 40;
  const FineSeries f = fine_series(nbar, g, t_max, per);
  const int n = static_cast<int>(f.t.size());
  // Mean of 2 s^2 over four fast periods approximates the squared envelope.
  const int half = 2 * per;
  std::vector<double> pre(n + 1, 0.0), env(n, 0.0);
  for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] + 2 * f.s[i] * f.s[i];
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - half), b = std::min(n, i + half + 1);
    env[i] = (pre[b] - pre[a]) / (b - a);
  }
  // Hysteresis: a bump opens above thr_hi and closes below thr_lo (envelope amplitudes 0.07 and 0.01).
  const double thr_hi = 0.005, thr_lo = 1e-4;
  std::vector<double> centers;
  int i = 0;
  while (i < n && env[i] > thr_lo) ++i;  // initial collapse
  while (i < n) {
    while (i < n && env[i] <= thr_hi) ++i;
    if (i >= n) break;
    while (i > 0 && env[i - 1] > thr_lo) --i;
    const int start = i;
    double m0 = 0, m1 = 0;
    while (i < n && env[i] > thr_lo) {
      m0 += env[i];
      m1 += env[i] * f.t[i];
      ++i;
    }
    if (i >= n && start > 0) break;  // bump cut by the end of the window
    centers.push_back(m1 / m0);
  }
  return centers;
}

double fit_collapse_rate(double nbar, double g, double t_fit) {
  const FineSeries f = fine_series(nbar, g, t_fit, 64);
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i + 1 < f.s.size(); ++i) {
    const double a = std::abs(f.s[i - 1]), b = std::abs(f.s[i]), c = std::abs(f.s[i + 1]);
    if (!(b >= a && b > c)) continue;
    const double den = a - 2 * b + c;
    const double off = den != 0 ? 0.5 * (a - c) / den : 0.0;
    const double amp = b - 0.25 * (a - c) * off;
    const double tp = f.t[i] + off * f.dt;
    if (amp < 1e-4) continue;
    xs.push_back(tp * tp);
    ys.push_back(std::log(2 * amp));
  }
  const std::size_t n = xs.size();
  if (n < 3) throw NumericError("fit_collapse_rate: too few peaks in the fit window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (slope >= 0) throw NumericError("fit_collapse_rate: envelope does not decay");
  return std::sqrt(-slope);
}

CollapseRevival collapse_revival(double nbar, double g, const std::vector<double>& t_grid) {
  require(g > 0, "collapse_revival: g must be > 0");
  const PoissonWindow w = poisson_window(nbar);
  CollapseRevival out;
  out.t = t_grid;
  out.gamma_c = g / std::sqrt(2.0);
  for (double t : t_grid) {
    out.series.push_back(collapse_revival_exact(w, g, t));
    out.envelope.push_back(0.5 - 0.5 * std::exp(-0.5 * g * g * t * t) * std::cos(2 * g * std::sqrt(nbar) * t));
  }
  const double t_max = t_grid.empty() ? 0.0 : t_grid.back();
  for (int m = 1; kPi * m * std::sqrt(nbar) / g <= t_max; ++m) out.t_revivals.push_back(kPi * m * std::sqrt(nbar) / g);
  if (t_max > 0) out.t_revivals_measured = measure_revivals(nbar, g, t_max);
  return out;
}

PDCAnalysis pdc_analysis(const PDCParams& p) {
  require(p.g >= 0, "pdc_analysis: g must be >= 0");
  const double D = p.Delta, g = p.g;
  const double ad = std::abs(D);
  if (std::abs(ad - g) <= 1e-12 * std::max(1.0, g))
    return {PDCPhase::Critical, std::numeric_limits<double>::infinity(), 0.0};
  if (ad > g) {
    const double sgn = D > 0 ? 1.0 : -1.0;
    return {PDCPhase::Stable, 0.5 * std::atanh(g / D), sgn * std::sqrt(D * D - g * g)};
  }
  return {PDCPhase::Unstable, 0.5 * std::atanh(D / g), std::sqrt(g * g - D * D)};
}

double pdc_photon_number(const PDCParams& p, double t) {
  const PDCAnalysis a = pdc_analysis(p);
  const double D = p.Delta, g = p.g;
  switch (a.phase) {
    case PDCPhase::Stable: {
      const double s = std::sin(a.rate * t);
      return g * g / (D * D - g * g) * s * s;
    }
    case PDCPhase::Unstable: {
      const double s = std::sinh(a.rate * t);
      return g * g / (g * g - D * D) * s * s;
    }
    case PDCPhase::Critical: return g * g * t * t;
  }
  return 0;
}

Operator pdc_hamiltonian(const PDCParams& p, int n_max) {
  const FockOps f = fock_ops(n_max);
  const Operator a2 = f.a * f.a;
  return p.Delta * f.N - (0.5 * p.g) * (a2.adjoint() + a2);
}

namespace {

// int_0^t e^{lambda (t - s)} e^{mu s} ds
cplx exp_convolution(cplx lambda, cplx mu, double t) {
  const cplx d = mu - lambda;
  if (std::abs(d * t) < 1e-8) return t * std::exp(lambda * t) * (1.0 + 0.5 * d * t);
  return (std::exp(mu * t) - std::exp(lambda * t)) / d;
}

}  // namespace

std::vector<CVec> solve_linear(const LinearSystem& sys, const CVec& x0, const std::vector<double>& t_grid) {
  const Eigen::Index n = sys.B.rows();
  require(sys.B.cols() == n && x0.size() == n, "solve_linear: dimension mismatch");
  Eigen::ComplexEigenSolver<CMat> es(sys.B);
  if (es.info() != Eigen::Success) throw NumericError("solve_linear: eigendecomposition failed");
  const CMat S = es.eigenvectors();
  const CVec lam = es.eigenvalues();
  Eigen::JacobiSVD<CMat> svd(S);
  const RVec sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= 1e8)) throw NumericError("solve_linear: eigenbasis condition number " + std::to_string(cond));
  const Eigen::PartialPivLU<CMat> lu(S);
  const CVec c0 = lu.solve(x0);
  CVec cy;
  if (sys.kind == LinearSystem::Forcing::Constant || sys.kind == LinearSystem::Forcing::Exponential) {
    require(sys.y.size() == n, "solve_linear: forcing vector dimension mismatch");
    cy = lu.solve(sys.y);
  }
  std::vector<CVec> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    CVec c = (lam * t).array().exp() * c0.array();
    switch (sys.kind) {
      case LinearSystem::Forcing::None: break;
      case LinearSystem::Forcing::Constant:
        for (Eigen::Index k = 0; k < n; ++k) c(k) += exp_convolution(lam(k), 0.0, t) * cy(k);
        break;
      case LinearSystem::Forcing::Exponential:
        for (Eigen::Index k = 0; k < n; ++k) c(k) += exp_convolution(lam(k), sys.mu, t) * cy(k);
        break;
      case LinearSystem::Forcing::Function: {
        // Composite 5-point Gauss-Legendre on 64 panels.
        static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                     0.9061798459386640};
        static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
        const int panels = 64;
        const double h = t / panels;
        CVec acc = CVec::Zero(n);
        for (int pnl = 0; pnl < panels && t > 0; ++pnl) {
          for (int q = 0; q < 5; ++q) {
            const double s = (pnl + 0.5) * h + 0.5 * h * gx[q];
            CVec fy = lu.solve(sys.f(s));
            acc.array() += 0.5 * h * gw[q] * (lam * (t - s)).array().exp() * fy.array();
          }
        }
        c += acc;
        break;
      }
    }
    out.push_back(S * c);
  }
  return out;
}

}  // namespace qo
