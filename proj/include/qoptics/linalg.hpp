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

#include <string_view>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qoptics/settings.hpp"

namespace qo {

template <typename Scalar>
using DenseMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class ExpmMethod { Zero, HermitianEigen, SkewHermitianEigen, NormalSchur, Pade };

std::string_view to_string(ExpmMethod m);

template <typename Scalar>
struct ExpmResult {
  DenseMat<Scalar> value;
  ExpmMethod method;
};

template <typename Derived>
double hermiticity_residual(const Eigen::MatrixBase<Derived>& A) {
  return (A - A.adjoint()).norm();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& A, double tol) {
  return hermiticity_residual(A) <= tol * std::max(1.0, A.norm());
}

// exp(A). Hermitian/skew-Hermitian/normal inputs go through an eigendecomposition,
// everything else through Pade scaling-and-squaring. The branch is reported.
template <typename Derived>
ExpmResult<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& A, double tol = 1e-12) {
  using Scalar = typename Derived::Scalar;
  using M = DenseMat<Scalar>;
  const M a = A;
  const double scale = a.norm();
  if (scale == 0.0) return {M::Identity(a.rows(), a.cols()), ExpmMethod::Zero};
  const double eps = tol * std::max(1.0, scale);

  if ((a - a.adjoint()).norm() <= eps) {
    Eigen::SelfAdjointEigenSolver<M> es(a);
    M e = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
          es.eigenvectors().adjoint();
    return {e, ExpmMethod::HermitianEigen};
  }
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    if ((a + a.adjoint()).norm() <= eps) {
      const M h = Scalar(0, -1) * a;  // a = i h
      Eigen::SelfAdjointEigenSolver<M> es(h);
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ph =
          (Scalar(0, 1) * es.eigenvalues().template cast<Scalar>()).array().exp();
      M e = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
      return {e, ExpmMethod::SkewHermitianEigen};
    }
    if ((a * a.adjoint() - a.adjoint() * a).norm() <= eps * scale) {
      Eigen::ComplexSchur<M> cs(a);
      const M& T = cs.matrixT();
      const double off = (T - M(T.diagonal().asDiagonal())).norm();
      if (off <= eps) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d = T.diagonal().array().exp();
        M e = cs.matrixU() * d.asDiagonal() * cs.matrixU().adjoint();
        return {e, ExpmMethod::NormalSchur};
      }
    }
  }
  M e = a.exp();
  return {e, ExpmMethod::Pade};
}

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar;
  DenseMat<Scalar> out = Eigen::kroneckerProduct(a.derived(), b.derived());
  return out;
}

// Column-stacking vec / unvec.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec(const Eigen::MatrixBase<Derived>& m) {
  DenseMat<typename Derived::Scalar> c = m;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(c.data(), c.size());
}

template <typename Derived>
DenseMat<typename Derived::Scalar> unvec(const Eigen::MatrixBase<Derived>& v, Eigen::Index rows) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> c = v;
  return Eigen::Map<const DenseMat<typename Derived::Scalar>>(c.data(), rows, c.size() / rows);
}

// Continuous Lyapunov solve A X + X A^T + Q = 0 through the Kronecker form (small systems only).
template <typename Scalar>
DenseMat<Scalar> lyapunov_transpose(const DenseMat<Scalar>& A, const DenseMat<Scalar>& Q) {
  const Eigen::Index n = A.rows();
  const DenseMat<Scalar> Id = DenseMat<Scalar>::Identity(n, n);
  const DenseMat<Scalar> K = kron(Id, A) + kron(A, Id);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = K.fullPivLu().solve(-vec(Q));
  return unvec(x, n);
}

// Trace norm of a Hermitian matrix.
double trace_norm_hermitian(const CMat& m);

}  // namespace qo
