// Copyright 2026 The pump-deck Authors
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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pumpdeck/eigen.hpp"
#include "pumpdeck/errors.hpp"
#include "pumpdeck/matrix.hpp"

namespace pumpdeck {

enum class Basis { Lab, Eigen };

inline constexpr double kStateHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kPositivityTolerance = -1e-8;

/// Diagnostics of how far a matrix is from being a valid state.
struct StateHealth {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double purity = 0.0;

  bool ok() const {
    return hermiticity_error <= kStateHermitianTolerance && trace_error <= kTraceTolerance &&
           min_eigenvalue >= kPositivityTolerance;
  }
};

/// Ascending eigenvalues of a Hermitian matrix, degenerate spectra allowed.
template <int N>
std::array<double, N> hermitian_eigenvalues(const Matrix<N>& m) {
  Matrix<N> herm = 0.5 * (m + m.adjoint());
  std::array<double, N> e{};
  if constexpr (N == 1) {
    e[0] = herm(0, 0).real();
  } else if constexpr (N == 2) {
    const double a = herm(0, 0).real(), d = herm(1, 1).real();
    const double r = std::hypot(0.5 * (a - d), std::abs(herm(0, 1)));
    e = {0.5 * (a + d) - r, 0.5 * (a + d) + r};
  } else {
    Matrix<N> v;
    detail::eigen_jacobi(herm, e, v);
  }
  return e;
}

/// Trace distance 0.5 * ||x - y||_1 between two Hermitian matrices.
template <int N>
double trace_distance(const Matrix<N>& x, const Matrix<N>& y) {
  double acc = 0.0;
  for (double e : hermitian_eigenvalues(Matrix<N>(x - y))) acc += std::abs(e);
  return 0.5 * acc;
}

template <int N>
StateHealth inspect_state(const Matrix<N>& rho) {
  StateHealth h;
  h.hermiticity_error = (rho - rho.adjoint()).max_abs();
  const cplx tr = rho.trace();
  h.trace_error = std::abs(tr - 1.0);
  h.min_eigenvalue = hermitian_eigenvalues(rho)[0];
  h.purity = trace_product(rho, rho).real();
  return h;
}

/// Hermitian, unit-trace, positive semidefinite state in a tagged basis.
template <int N>
class DensityMatrix {
 public:
  DensityMatrix(const Matrix<N>& m, Basis basis = Basis::Lab) : m_(m), basis_(basis) {
    const StateHealth h = inspect_state(m_);
    if (!h.ok()) {
      std::ostringstream os;
      os << "not a density matrix (hermiticity " << h.hermiticity_error << ", trace error "
         << h.trace_error << ", min eigenvalue " << h.min_eigenvalue << ")";
      throw PumpError(ErrorKind::InvalidState, os.str());
    }
  }

  static DensityMatrix pure(const Vector<N>& psi, Basis basis = Basis::Lab) {
    return DensityMatrix(Matrix<N>::outer(psi, psi), basis);
  }

  const Matrix<N>& matrix() const { return m_; }
  Basis basis() const { return basis_; }

  /// Same state expressed in the given frame (lab -> eigen) or back.
  DensityMatrix to_eigen(const EigenFrame<N>& frame) const {
    return basis_ == Basis::Eigen ? *this : DensityMatrix(frame.project(m_), Basis::Eigen);
  }
  DensityMatrix to_lab(const EigenFrame<N>& frame) const {
    return basis_ == Basis::Lab ? *this : DensityMatrix(frame.unproject(m_), Basis::Lab);
  }

 private:
  Matrix<N> m_;
  Basis basis_;
};

}  // namespace pumpdeck
