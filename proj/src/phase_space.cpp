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

#include "qoptics/phase_space.hpp"

#include <cmath>
#include <functional>

namespace qo {

PhaseGrid PhaseGrid::square(double half_width, int n) {
  PhaseGrid g{-half_width, half_width, -half_width, half_width, n, n};
  g.validate();
  return g;
}

PhaseGrid PhaseGrid::default_for(int n_max) {
  require(n_max >= 0, "PhaseGrid: n_max must be >= 0");
  return square(2.0 * std::sqrt(static_cast<double>(n_max)) + 4.0, 257);
}

void PhaseGrid::validate() const {
  require(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(p_min) && std::isfinite(p_max),
          "PhaseGrid: bounds must be finite");
  require(x_min < x_max && p_min < p_max, "PhaseGrid: bounds must be ordered");
  require(nx >= 2 && np >= 2, "PhaseGrid: need at least 2 samples per axis");
}

GaussianState GaussianState::checked(const Eigen::Vector2d& d, const Eigen::Matrix2d& V, const Tolerances& tol) {
  require(d.allFinite() && V.allFinite(), "GaussianState: non-finite entries");
  require(std::abs(V(0, 1) - V(1, 0)) <= tol.gauss * std::max(1.0, V.norm()), "GaussianState: V not symmetric");
  const double det = V.determinant();
  if (!(V(0, 0) > 0 && det > 0))
    throw InvalidArgument("GaussianState: V not positive definite (det V = " + std::to_string(det) + ")");
  // det V carries a rounding error of order eps V00 V11.
  if (det < 1.0 - tol.gauss * std::max(1.0, V(0, 0) * V(1, 1)))
    throw InvalidArgument("GaussianState: uncertainty bound violated, det V = " + std::to_string(det));
  return {d, V};
}

SymplecticMap SymplecticMap::checked(const Eigen::Matrix2d& S, const Eigen::Vector2d& a, const Tolerances& tol) {
  Eigen::Matrix2d Om;
  Om << 0, 1, -1, 0;
  const double res = (S * Om * S.transpose() - Om).norm();
  if (res > tol.symp * std::max(1.0, S.squaredNorm()))
    throw InvalidArgument("SymplecticMap: S Omega S^T != Omega (residual " + std::to_string(res) + ")");
  return {S, a};
}

Eigen::Matrix2d rotation_matrix(double theta) {
  Eigen::Matrix2d R;
  const double c = std::cos(theta), s = std::sin(theta);
  R << c, s, -s, c;
  return R;
}

SymplecticMap displacement_map(cplx alpha) {
  return {Eigen::Matrix2d::Identity(), Eigen::Vector2d(2 * alpha.real(), 2 * alpha.imag())};
}

SymplecticMap rotation_map(double theta) { return {rotation_matrix(theta), Eigen::Vector2d::Zero()}; }

SymplecticMap squeeze_map(cplx z) {
  const double r = std::abs(z), th = std::arg(z);
  const Eigen::Matrix2d R = rotation_matrix(th / 2);
  const Eigen::Matrix2d Q = Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal();
  return {R.transpose() * Q * R, Eigen::Vector2d::Zero()};
}

double laguerre(int n, double s) {
  if (n == 0) return 1.0;
  double l0 = 1.0, l1 = 1.0 - s;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 - s) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

double wigner_fock(int n, double x, double p) {
  require(n >= 0, "wigner_fock: n must be >= 0");
  const double s = x * x + p * p;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign / (2 * kPi) * laguerre(n, s) * std::exp(-0.5 * s);
}

double wigner_gaussian(const GaussianState& g, double x, double p) {
  const double det = g.V.determinant();
  if (!(det > 0)) throw InvalidArgument("wigner_gaussian: singular covariance");
  const Eigen::Vector2d r(x - g.d(0), p - g.d(1));
  return std::exp(-0.5 * r.dot(g.V.inverse() * r)) / (2 * kPi * std::sqrt(det));
}

RMat fock_wavefunctions(int n_max, const RVec& x) {
  RMat psi(n_max + 1, x.size());
  const double c0 = std::pow(2 * kPi, -0.25);
  psi.row(0) = c0 * (-0.25 * x.array().square()).exp();
  const auto xr = x.transpose().array();
  if (n_max >= 1) psi.row(1) = xr * psi.row(0).array();
  for (int n = 1; n < n_max; ++n)
    psi.row(n + 1) = (xr * psi.row(n).array() - std::sqrt(static_cast<double>(n)) * psi.row(n - 1).array()) /
                     std::sqrt(n + 1.0);
  return psi;
}

namespace {

int highest_populated(const CMat& rho) {
  int n_eff = 0;
  for (int n = 0; n < rho.rows(); ++n)
    if (std::abs(rho(n, n)) > 1e-14) n_eff = n;
  return n_eff;
}

}  // namespace

WignerGrid wigner_numeric(const DensityMatrix& rho, const PhaseGrid& grid) {
  grid.validate();
  require(rho.basis.factors.size() == 1 && rho.basis.factors[0].kind == Factor::Kind::Fock,
          "wigner_numeric: needs a single Fock factor, got " + rho.basis.describe());
  const int d = rho.basis.total_dim();
  const int n_eff = highest_populated(rho.rho);
  const double nyq = kPi / (2.0 * std::sqrt(std::max(1.0, static_cast<double>(n_eff))));
  if (grid.dx() > nyq || grid.dp() > nyq)
    throw InvalidArgument("wigner_numeric: grid spacing (" + std::to_string(std::max(grid.dx(), grid.dp())) +
                          ") exceeds resolution limit " + std::to_string(nyq) + " for Fock level " +
                          std::to_string(n_eff));

  const double reach = 2.0 * std::sqrt(n_eff + 1.0);
  const double support = reach + 12.0;
  const double pabs = std::max(std::abs(grid.p_min), std::abs(grid.p_max));
  const double dy = kPi / (2.0 * std::max(pabs, reach + 6.0));
  const int ny = static_cast<int>(std::ceil(2.0 * support / dy)) + 1;
  const RVec y = RVec::LinSpaced(ny, 0.0, dy * (ny - 1));

  // Hermitian symmetry F(-y) = conj F(y) folds the integral onto y >= 0.
  const RVec ps = grid.ps();
  CMat E(grid.np, ny);
  for (int k = 0; k < grid.np; ++k)
    for (int j = 0; j < ny; ++j) E(k, j) = (j == 0 ? dy : 2 * dy) * std::exp(-0.5 * I * ps(k) * y(j));

  const RVec xs = grid.xs();
  CMat F(ny, grid.nx);
  for (int i = 0; i < grid.nx; ++i) {
    const RMat up = fock_wavefunctions(d - 1, (xs(i) + 0.5 * y.array()).matrix());
    const RMat um = fock_wavefunctions(d - 1, (xs(i) - 0.5 * y.array()).matrix());
    const CMat rv = rho.rho * um.cast<cplx>();
    F.col(i) = (up.cast<cplx>().array() * rv.array()).colwise().sum().transpose();
  }
  const CMat Wc = E * F;  // np x nx
  WignerGrid w{grid, Wc.real().transpose() / (4 * kPi)};
  return w;
}

WignerGrid wigner_gaussian_grid(const GaussianState& g, const PhaseGrid& grid) {
  grid.validate();
  const RVec xs = grid.xs(), ps = grid.ps();
  RMat v(grid.nx, grid.np);
  for (int i = 0; i < grid.nx; ++i)
    for (int k = 0; k < grid.np; ++k) v(i, k) = wigner_gaussian(g, xs(i), ps(k));
  return {grid, v};
}

namespace {
RVec trapezoid_weights(int n, double h) {
  RVec w = RVec::Constant(n, h);
  w(0) = w(n - 1) = 0.5 * h;
  return w;
}
}  // namespace

Marginal marginal(const WignerGrid& w, Axis axis) {
  const auto& g = w.grid;
  if (axis == Axis::X) return {g.xs(), w.values * trapezoid_weights(g.np, g.dp())};
  return {g.ps(), w.values.transpose() * trapezoid_weights(g.nx, g.dx())};
}

double integrate(const WignerGrid& w) {
  const auto& g = w.grid;
  return trapezoid_weights(g.nx, g.dx()).dot(w.values * trapezoid_weights(g.np, g.dp()));
}

double overlap_wigner(const WignerGrid& w1, const WignerGrid& w2) {
  require(w1.grid == w2.grid, "overlap_wigner: grids differ");
  const WignerGrid prod{w1.grid, w1.values.cwiseProduct(w2.values)};
  return 4 * kPi * integrate(prod);
}

double phase_space_moment(const WignerGrid& w, int m, int n) {
  const RVec xs = w.grid.xs(), ps = w.grid.ps();
  const RMat f = xs.array().pow(m).matrix() * ps.array().pow(n).matrix().transpose();
  return integrate({w.grid, w.values.cwiseProduct(f)});
}

double gaussian_moment(const Eigen::Matrix2d& V, const std::vector<int>& idx) {
  for (int i : idx) require(i == 0 || i == 1, "gaussian_moment: indices must be 0 (x) or 1 (p)");
  if (idx.size() % 2 == 1) return 0.0;
  std::function<double(std::vector<int>)> rec = [&](std::vector<int> rest) -> double {
    if (rest.empty()) return 1.0;
    const int first = rest.front();
    double s = 0.0;
    for (std::size_t k = 1; k < rest.size(); ++k) {
      std::vector<int> sub;
      sub.reserve(rest.size() - 2);
      for (std::size_t j = 1; j < rest.size(); ++j)
        if (j != k) sub.push_back(rest[j]);
      s += V(first, rest[k]) * rec(std::move(sub));
    }
    return s;
  };
  return rec(idx);
}

GaussianState symplectic_apply(const SymplecticMap& m, const GaussianState& g, const Tolerances& tol) {
  SymplecticMap::checked(m.S, m.a, tol);
  Eigen::Matrix2d V = m.S * g.V * m.S.transpose();
  V = 0.5 * (V + V.transpose());
  return GaussianState::checked(m.S * g.d + m.a, V, tol);
}

GaussianState gaussian_from_complex_moments(cplx mean_a, cplx var_a, double n_fluct, const Tolerances& tol) {
  Eigen::Matrix2d V;
  V << 1 + 2 * n_fluct + 2 * var_a.real(), 2 * var_a.imag(), 2 * var_a.imag(), 1 + 2 * n_fluct - 2 * var_a.real();
  return GaussianState::checked(Eigen::Vector2d(2 * mean_a.real(), 2 * mean_a.imag()), V, tol);
}

GaussianState gaussian_from_state(const DensityMatrix& rho, const Tolerances& tol) {
  require(rho.basis.factors.size() == 1 && rho.basis.factors[0].kind == Factor::Kind::Fock,
          "gaussian_from_state: needs a single Fock factor");
  const FockOps f = fock_ops(rho.basis.factors[0].n_max);
  const cplx m = expectation(f.a, rho);
  const cplx a2 = expectation(f.a * f.a, rho);
  const double n = expectation(f.N, rho).real();
  return gaussian_from_complex_moments(m, a2 - m * m, n - std::norm(m), tol);
}

}  // namespace qo
