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

#include "qoptics/linalg.hpp"

namespace qo {

std::string_view to_string(ExpmMethod m) {
  switch (m) {
    case ExpmMethod::Zero: return "zero";
    case ExpmMethod::HermitianEigen: return "hermitian-eigen";
    case ExpmMethod::SkewHermitianEigen: return "skew-hermitian-eigen";
    case ExpmMethod::NormalSchur: return "normal-schur";
    case ExpmMethod::Pade: return "pade";
  }
  return "unknown";
}

double trace_norm_hermitian(const CMat& m) {
  const CMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qo
