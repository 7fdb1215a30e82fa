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
#include <array>
#include <cmath>
#include <numeric>
#include <type_traits>
#include <sstream>

#include "pumpdeck/errors.hpp"
#include "pumpdeck/matrix.hpp"

namespace pumpdeck {

/// Spectra closer than this are treated as degenerate; every first-order
/// formula divides by an energy gap.
inline constexpr double kGapThreshold = 1e-6;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kGaugeTieTolerance = 1e-12;

/// Instantaneous eigendecomposition with ascending eigenvalues and
/// gauge-fixed eigenvectors stored as the columns of `vectors`.
template <int N>
struct EigenFrame {
  std::array<double, N> energies{};
  Matrix<N> vectors;

  Vector<N> state(int m) const { return vectors.column(m); }
  /// g_mj = E_m - E_j
  double gap(int m, int j) const { return energies[m] - energies[j]; }
  double min_gap() const {
    double g = INFINITY;
    for (int i = 0; i + 1 < N; ++i) g = std::min(g, energies[i + 1] - energies[i]);
    return g;
  }
  /// Matrix elements <i|op|j> in this frame.
  Matrix<N> project(const Matrix<N>& op) const { return vectors.adjoint() * op * vectors; }
  /// Inverse of project: sum_ij x_ij |i><j|.
  Matrix<N> unproject(const Matrix<N>& x) const { return vectors * x * vectors.adjoint(); }
};

/// Rotates `v` so that its largest-magnitude component is real and positive.
/// Ties within kGaugeTieTolerance go to the lowest index.
template <int N>
Vector<N> gauge_fix(const Vector<N>& v) {
  int pivot = 0;
  double best = std::abs(v[0]);
  for (int i = 1; i < N; ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best + kGaugeTieTolerance) {
      best = mag;
      pivot = i;
    }
  }
  if (best == 0.0) return v;
  const cplx phase = std::conj(v[pivot]) / best;
  Vector<N> out;
  for (int i = 0; i < N; ++i) out[i] = v[i] * phase;
  out[pivot] = best;
  return out;
}

template <int N>
Matrix<N> gauge_fix(const Matrix<N>& columns) {
  Matrix<N> out;
  for (int j = 0; j < N; ++j) out.set_column(j, gauge_fix(columns.column(j)));
  return out;
}

namespace detail {

inline void throw_degenerate(double gap) {
  std::ostringstream os;
  os << "spectral gap " << gap << " below threshold " << kGapThreshold;
  throw PumpError(ErrorKind::DegenerateSpectrum, os.str());
}

inline void eigen_closed_form(const Matrix<2>& h, std::array<double, 2>& e, Matrix<2>& vecs) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const cplx b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  const double r = std::hypot(half, std::abs(b));
  e = {mean - r, mean + r};
  for (int m = 0; m < 2; ++m) {
    // (H - E)v = 0 admits two candidate null vectors; keep the better conditioned one.
    Vector<2> u{{b, e[m] - a}};
    Vector<2> w{{e[m] - d, std::conj(b)}};
    Vector<2> v = u.norm() >= w.norm() ? u : w;
    double n = v.norm();
    if (n == 0.0) {  // H proportional to identity
      v = Vector<2>{};
      v[m] = 1.0;
      n = 1.0;
    }
    for (int i = 0; i < 2; ++i) v[i] /= n;
    vecs.set_column(m, v);
  }
}

/// Cyclic complex Jacobi: each pivot is made real by a diagonal phase and
/// then annihilated by a real plane rotation.
template <int N>
void eigen_jacobi(Matrix<N> h, std::type_identity_t<std::array<double, N>>& e, Matrix<N>& vecs) {
  vecs = Matrix<N>::identity();
  const double scale = std::max(1.0, h.max_abs());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += std::norm(h(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double mag = std::abs(h(p, q));
        if (mag <= 1e-18 * scale) continue;
        const cplx phase = h(p, q) / mag;  // e^{i phi}
        const double theta = (h(q, q).real() - h(p, p).real()) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
        const cplx u_pp = c, u_pq = s, u_qp = -s * std::conj(phase), u_qq = c * std::conj(phase);
        for (int i = 0; i < N; ++i) {  // h <- h U, vecs <- vecs U
          const cplx hp = h(i, p), hq = h(i, q);
          h(i, p) = hp * u_pp + hq * u_qp;
          h(i, q) = hp * u_pq + hq * u_qq;
          const cplx vp = vecs(i, p), vq = vecs(i, q);
          vecs(i, p) = vp * u_pp + vq * u_qp;
          vecs(i, q) = vp * u_pq + vq * u_qq;
        }
        for (int j = 0; j < N; ++j) {  // h <- U^dagger h
          const cplx hp = h(p, j), hq = h(q, j);
          h(p, j) = std::conj(u_pp) * hp + std::conj(u_qp) * hq;
          h(q, j) = std::conj(u_pq) * hp + std::conj(u_qq) * hq;
        }
        h(p, q) = 0.0;
        h(q, p) = 0.0;
      }
    }
  }
  std::array<int, N> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return h(x, x).real() < h(y, y).real(); });
  Matrix<N> sorted;
  for (int m = 0; m < N; ++m) {
    e[m] = h(order[m], order[m]).real();
    sorted.set_column(m, vecs.column(order[m]));
  }
  vecs = sorted;
}

}  // namespace detail

/// Ascending eigenvalues and gauge-fixed orthonormal eigenvectors.
/// Throws NotHermitian or DegenerateSpectrum (gap <= gap_threshold).
template <int N>
EigenFrame<N> eigendecompose(const Matrix<N>& h, double gap_threshold = kGapThreshold) {
  const double tol = kHermitianTolerance * std::max(1.0, h.max_abs());
  if (!h.is_hermitian(tol)) {
    throw PumpError(ErrorKind::NotHermitian, "matrix deviates from its adjoint beyond tolerance");
  }
  EigenFrame<N> frame;
  if constexpr (N == 1) {
    frame.energies[0] = h(0, 0).real();
    frame.vectors = Matrix<1>::identity();
    return frame;
  } else if constexpr (N == 2) {
    detail::eigen_closed_form(h, frame.energies, frame.vectors);
  } else {
    detail::eigen_jacobi(h, frame.energies, frame.vectors);
  }
  const double gap = frame.min_gap();
  if (!(gap > gap_threshold)) detail::throw_degenerate(gap);
  frame.vectors = gauge_fix(frame.vectors);
  return frame;
}

/// <j| d/dlambda |m> = <j|dH/dlambda|m> / g_mj, gauge-free (no differentiation
/// of eigenvectors).
template <int N>
cplx offdiag_coupling(const EigenFrame<N>& frame, const Matrix<N>& dh, int m, int j,
                      double gap_threshold = kGapThreshold) {
  if (m == j) throw PumpError(ErrorKind::DiagonalRequest, "coupling requested for m == j");
  const double g = frame.gap(m, j);
  if (!(std::abs(g) > gap_threshold)) detail::throw_degenerate(std::abs(g));
  return dh.sandwich(frame.state(j), frame.state(m)) / g;
}

/// All connection elements X_jm = <j|d/dlambda|m> (zero diagonal) from the
/// projected derivative matrix.
template <int N>
Matrix<N> connection(const EigenFrame<N>& frame, const Matrix<N>& dh_projected) {
  Matrix<N> x;
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m)
      if (m != j) x(j, m) = dh_projected(j, m) / frame.gap(m, j);
  return x;
}

}  // namespace pumpdeck
