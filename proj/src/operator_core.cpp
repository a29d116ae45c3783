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

#include "qoptics/operator_core.hpp"

#include <cmath>
#include <sstream>

namespace qo {

Factor Factor::fock(int n_max) {
  require(n_max >= 1, "Fock factor needs n_max >= 1, got " + std::to_string(n_max));
  return {Kind::Fock, n_max};
}

BasisSpec BasisSpec::product(std::vector<Factor> f) {
  require(!f.empty(), "basis needs at least one factor");
  return {std::move(f)};
}

int BasisSpec::total_dim() const {
  int d = 1;
  for (const auto& f : factors) d *= f.dim();
  return d;
}

std::string BasisSpec::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) os << " x ";
    if (factors[i].kind == Factor::Kind::Fock)
      os << "Fock(" << factors[i].n_max << ")";
    else
      os << "TwoLevel";
  }
  return os.str();
}

Operator::Operator(BasisSpec b, CMat mat) : basis(std::move(b)), m(std::move(mat)) {
  const int d = basis.total_dim();
  require(m.rows() == d && m.cols() == d,
          "operator of size " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
              " does not match basis " + basis.describe());
}

Operator Operator::identity(const BasisSpec& b) {
  return {b, CMat::Identity(b.total_dim(), b.total_dim())};
}

Operator Operator::zero(const BasisSpec& b) { return {b, CMat::Zero(b.total_dim(), b.total_dim())}; }

static void same_basis(const BasisSpec& a, const BasisSpec& b) {
  require(a == b, "basis mismatch: " + a.describe() + " vs " + b.describe());
}

Operator operator+(const Operator& a, const Operator& b) {
  same_basis(a.basis, b.basis);
  return {a.basis, a.m + b.m};
}
Operator operator-(const Operator& a, const Operator& b) {
  same_basis(a.basis, b.basis);
  return {a.basis, a.m - b.m};
}
Operator operator*(const Operator& a, const Operator& b) {
  same_basis(a.basis, b.basis);
  return {a.basis, a.m * b.m};
}
Operator operator*(cplx s, const Operator& a) { return {a.basis, s * a.m}; }
Operator operator*(double s, const Operator& a) { return {a.basis, s * a.m}; }
Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

std::optional<std::string> density_violation(const CMat& rho, const Tolerances& tol) {
  if (rho.rows() != rho.cols()) return "density matrix not square";
  if (!rho.allFinite()) return "density matrix has non-finite entries";
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.herm) return "Hermiticity residual " + std::to_string(herm);
  const double tr_err = std::abs(rho.trace() - 1.0);
  if (tr_err > tol.trace) return "trace deviation " + std::to_string(tr_err);
  const CMat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -tol.psd) return "negative eigenvalue " + std::to_string(lmin);
  return std::nullopt;
}

DensityMatrix DensityMatrix::checked(BasisSpec b, CMat rho, const Tolerances& tol) {
  require(rho.rows() == b.total_dim(), "density matrix size does not match basis " + b.describe());
  if (auto v = density_violation(rho, tol)) throw InvalidArgument("invalid density matrix: " + *v);
  return {std::move(b), std::move(rho), 0.0};
}

DensityMatrix DensityMatrix::from_ket(const KetState& k) {
  return {k.basis, k.amp * k.amp.adjoint(), k.leakage};
}

FockOps fock_ops(int n_max) {
  require(n_max >= 1, "fock_ops: n_max must be >= 1");
  const BasisSpec b = BasisSpec::fock(n_max);
  const int d = n_max + 1;
  CMat a = CMat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const CMat ad = a.adjoint();
  CMat N = CMat::Zero(d, d);
  for (int n = 0; n < d; ++n) N(n, n) = n;
  return {{b, a}, {b, ad}, {b, N}, {b, ad + a}, {b, I * (ad - a)}};
}

PauliOps pauli_ops() {
  const BasisSpec b = BasisSpec::two_level();
  CMat sx(2, 2), sy(2, 2), sz(2, 2), sm(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -I, I, 0;
  sz << 1, 0, 0, -1;
  sm << 0, 0, 1, 0;  // |g><e| with (|e>, |g>) ordering
  return {{b, sx}, {b, sy}, {b, sz}, {b, sm}, {b, sm.adjoint()}};
}

Operator tensor_embed(const Operator& op, int slot, const BasisSpec& basis) {
  require(slot >= 0 && slot < static_cast<int>(basis.factors.size()),
          "tensor_embed: slot " + std::to_string(slot) + " out of range");
  const int fd = basis.factors[slot].dim();
  require(op.m.rows() == fd, "tensor_embed: operator dim " + std::to_string(op.m.rows()) +
                                 " does not match factor dim " + std::to_string(fd));
  CMat out = CMat::Identity(1, 1);
  for (int i = 0; i < static_cast<int>(basis.factors.size()); ++i) {
    const int d = basis.factors[i].dim();
    out = (i == slot) ? kron(out, op.m) : kron(out, CMat::Identity(d, d));
  }
  return {basis, out};
}

int default_cutoff_coherent(cplx alpha) {
  const double a = std::abs(alpha);
  return static_cast<int>(std::ceil(a * a + 6 * a + 10));
}

int default_cutoff_squeezed(double r) {
  const double t = std::tanh(std::abs(r));
  if (t < 1e-8) return 10;
  // |c_n|^2 falls like tanh(r)^n; stop where that reaches 1e-15.
  return static_cast<int>(std::ceil(std::log(1e-15) / std::log(t))) + 10;
}

namespace {

// Unnormalized exact amplitudes up to n_max plus the mass missing beyond n_max.
CVec coherent_amplitudes(cplx alpha, int n_max, double& tail) {
  CVec c(n_max + 1);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_max; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  tail = std::max(0.0, 1.0 - c.squaredNorm());
  return c;
}

CVec squeezed_amplitudes(cplx z, int n_max, double& tail) {
  const double r = std::abs(z);
  const cplx ph = r > 0 ? z / r : cplx(1.0);
  CVec c = CVec::Zero(n_max + 1);
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 0; 2 * n + 2 <= n_max; ++n)
    c(2 * n + 2) = -ph * std::tanh(r) * std::sqrt((2.0 * n + 1) / (2.0 * n + 2)) * c(2 * n);
  tail = std::max(0.0, 1.0 - c.squaredNorm());
  return c;
}

void truncation_warning(const char* what, const CMat& U, const CVec& exact, double tail, Report* report,
                        const Tolerances& tol) {
  const double res = (U.col(0) - exact).norm() + std::sqrt(tail);
  if (res > tol.trunc)
    warn_if(report, std::string(what) + ": truncation residual " + std::to_string(res) + " exceeds " +
                        std::to_string(tol.trunc) + "; raise n_max");
}

}  // namespace

Operator displacement_op(cplx alpha, int n_max, Report* report, const Tolerances& tol) {
  const FockOps f = fock_ops(n_max);
  const CMat gen = alpha * f.a_dag.m - std::conj(alpha) * f.a.m;
  CMat U = expm(gen).value;
  double tail = 0;
  truncation_warning("displacement_op", U, coherent_amplitudes(alpha, n_max, tail), tail, report, tol);
  return {f.a.basis, U};
}

Operator squeeze_op(cplx z, int n_max, Report* report, const Tolerances& tol) {
  const FockOps f = fock_ops(n_max);
  const CMat a2 = f.a.m * f.a.m;
  const CMat gen = 0.5 * std::conj(z) * a2 - 0.5 * z * a2.adjoint();
  CMat U = expm(gen).value;
  double tail = 0;
  truncation_warning("squeeze_op", U, squeezed_amplitudes(z, n_max, tail), tail, report, tol);
  return {f.a.basis, U};
}

KetState fock_state(int n, int n_max) {
  require(n >= 0 && n <= n_max, "fock_state: n outside 0..n_max");
  CVec c = CVec::Zero(n_max + 1);
  c(n) = 1.0;
  return {BasisSpec::fock(n_max), c, 0.0};
}

KetState coherent_state(cplx alpha, int n_max) {
  double tail = 0;
  CVec c = coherent_amplitudes(alpha, n_max, tail);
  const double leak = 1.0 - c.squaredNorm();
  c /= c.norm();
  return {BasisSpec::fock(n_max), c, leak};
}

KetState squeezed_vacuum(cplx z, int n_max) {
  double tail = 0;
  CVec c = squeezed_amplitudes(z, n_max, tail);
  const double leak = 1.0 - c.squaredNorm();
  c /= c.norm();
  return {BasisSpec::fock(n_max), c, leak};
}

DensityMatrix thermal_state(double nbar, int n_max) {
  require(nbar >= 0, "thermal_state: nbar must be >= 0");
  const int d = n_max + 1;
  RVec p(d);
  const double q = nbar / (1.0 + nbar);
  p(0) = 1.0 / (1.0 + nbar);
  for (int n = 1; n < d; ++n) p(n) = p(n - 1) * q;
  const double leak = 1.0 - p.sum();
  p /= p.sum();
  CMat rho = CMat::Zero(d, d);
  rho.diagonal() = p.cast<cplx>();
  return {BasisSpec::fock(n_max), rho, leak};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  require(!keep.empty(), "partial_trace: empty keep set");
  const auto& fs = rho.basis.factors;
  const int nf = static_cast<int>(fs.size());
  std::vector<bool> kept(nf, false);
  for (int k : keep) {
    require(k >= 0 && k < nf, "partial_trace: factor index " + std::to_string(k) + " out of range");
    require(!kept[k], "partial_trace: duplicate factor index");
    kept[k] = true;
  }
  std::vector<int> dims(nf);
  for (int i = 0; i < nf; ++i) dims[i] = fs[i].dim();
  std::vector<Factor> kf;
  int dk = 1, dt = 1;
  for (int i = 0; i < nf; ++i) {
    if (kept[i]) {
      kf.push_back(fs[i]);
      dk *= dims[i];
    } else {
      dt *= dims[i];
    }
  }
  // full index of (kept multi-index a, traced multi-index t); factor 0 is most significant.
  std::vector<int> full(static_cast<std::size_t>(dk) * dt);
  std::vector<int> digits(nf);
  const int D = rho.basis.total_dim();
  for (int idx = 0; idx < D; ++idx) {
    int rem = idx;
    for (int i = nf - 1; i >= 0; --i) {
      digits[i] = rem % dims[i];
      rem /= dims[i];
    }
    int a = 0, t = 0;
    for (int i = 0; i < nf; ++i) {
      if (kept[i])
        a = a * dims[i] + digits[i];
      else
        t = t * dims[i] + digits[i];
    }
    full[static_cast<std::size_t>(a) * dt + t] = idx;
  }
  CMat red = CMat::Zero(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dk; ++b) {
      cplx s = 0;
      for (int t = 0; t < dt; ++t) s += rho.rho(full[a * dt + t], full[b * dt + t]);
      red(a, b) = s;
    }
  return {BasisSpec{kf}, red, rho.leakage};
}

cplx expectation(const Operator& op, const KetState& psi) {
  same_basis(op.basis, psi.basis);
  return psi.amp.dot(op.m * psi.amp);
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
  same_basis(op.basis, rho.basis);
  return (rho.rho.transpose().cwiseProduct(op.m)).sum();
}

namespace {
double checked_variance(const Operator& op, cplx m1, cplx m2, const Tolerances& tol) {
  const cplx v = m2 - m1 * m1;
  if (is_hermitian(op.m, tol.herm) && std::abs(v.imag()) > tol.herm * std::max(1.0, std::abs(m2)))
    throw NumericError("variance: imaginary part " + std::to_string(v.imag()) + " for Hermitian operator");
  return v.real();
}
}  // namespace

double variance(const Operator& op, const KetState& psi, const Tolerances& tol) {
  return checked_variance(op, expectation(op, psi), expectation(op * op, psi), tol);
}

double variance(const Operator& op, const DensityMatrix& rho, const Tolerances& tol) {
  return checked_variance(op, expectation(op, rho), expectation(op * op, rho), tol);
}

SpectralPropagator::SpectralPropagator(const Operator& H, const Tolerances& tol) : basis(H.basis) {
  if (!is_hermitian(H.m, tol.herm))
    throw InvalidArgument("propagator: Hamiltonian not Hermitian (residual " +
                          std::to_string(hermiticity_residual(H.m)) + ")");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H.m + H.m.adjoint()));
  energies = es.eigenvalues();
  vectors = es.eigenvectors();
}

CMat SpectralPropagator::at(double t) const {
  CVec ph = (-I * t * energies.cast<cplx>()).array().exp();
  return vectors * ph.asDiagonal() * vectors.adjoint();
}

CVec SpectralPropagator::apply(const CVec& psi0, double t) const {
  CVec c = vectors.adjoint() * psi0;
  c.array() *= (-I * t * energies.cast<cplx>()).array().exp();
  return vectors * c;
}

Operator propagator(const Operator& H, double t, const Tolerances& tol) {
  return {H.basis, SpectralPropagator(H, tol).at(t)};
}

void fix_global_phase(CVec& v, double cutoff) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > cutoff) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

double trace_distance(const CMat& a, const CMat& b) { return 0.5 * trace_norm_hermitian(a - b); }

}  // namespace qo
