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
#include <complex>
#include <cstddef>
#include <initializer_list>

namespace pumpdeck {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

/// Dense column vector of fixed dimension.
template <int N>
struct Vector {
  static_assert(N >= 1);
  std::array<cplx, N> v{};

  cplx& operator[](int i) { return v[i]; }
  const cplx& operator[](int i) const { return v[i]; }

  double norm() const {
    double acc = 0.0;
    for (const auto& x : v) acc += std::norm(x);
    return std::sqrt(acc);
  }
};

template <int N>
Vector<N> operator*(cplx c, Vector<N> x) {
  for (auto& e : x.v) e *= c;
  return x;
}
template <int N>
Vector<N> operator*(double c, Vector<N> x) {
  for (auto& e : x.v) e *= c;
  return x;
}
template <int N>
Vector<N> operator+(Vector<N> x, const Vector<N>& y) {
  for (int i = 0; i < N; ++i) x[i] += y[i];
  return x;
}
template <int N>
Vector<N> operator-(Vector<N> x, const Vector<N>& y) {
  for (int i = 0; i < N; ++i) x[i] -= y[i];
  return x;
}

template <int N>
cplx dot(const Vector<N>& a, const Vector<N>& b) {  // <a|b>
  cplx acc = 0.0;
  for (int i = 0; i < N; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

/// Dense N x N complex matrix, row-major, value semantics.
///
/// Small fixed sizes (2 and 3 in the shipped models) keep every hot loop
/// unrollable; nothing here allocates.
template <int N>
struct Matrix {
  static_assert(N >= 1);
  static constexpr int dim = N;
  std::array<cplx, N * N> a{};

  Matrix() = default;
  Matrix(std::initializer_list<cplx> rows_flat) {
    std::copy_n(rows_flat.begin(), std::min<std::size_t>(rows_flat.size(), N * N), a.begin());
  }

  static Matrix zero() { return Matrix{}; }
  static Matrix identity() {
    Matrix m;
    for (int i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(const std::array<double, N>& d) {
    Matrix m;
    for (int i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix outer(const Vector<N>& x, const Vector<N>& y) {  // |x><y|
    Matrix m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = x[i] * std::conj(y[j]);
    return m;
  }

  cplx& operator()(int i, int j) { return a[i * N + j]; }
  const cplx& operator()(int i, int j) const { return a[i * N + j]; }

  Vector<N> column(int j) const {
    Vector<N> c;
    for (int i = 0; i < N; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(int j, const Vector<N>& c) {
    for (int i = 0; i < N; ++i) (*this)(i, j) = c[i];
  }

  Matrix adjoint() const {
    Matrix m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = std::conj((*this)(j, i));
    return m;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (int i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    for (int i = 0; i < N * N; ++i) a[i] += o.a[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (int i = 0; i < N * N; ++i) a[i] -= o.a[i];
    return *this;
  }
  Matrix& operator*=(cplx c) {
    for (auto& x : a) x *= c;
    return *this;
  }
  Matrix& operator*=(double c) {
    for (auto& x : a) x *= c;
    return *this;
  }

  /// Largest absolute entry.
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
  }
  double frobenius() const {
    double acc = 0.0;
    for (const auto& x : a) acc += std::norm(x);
    return std::sqrt(acc);
  }

  bool is_hermitian(double tol = 1e-12) const {
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j)
        if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
  }

  /// <x| M |y>
  cplx sandwich(const Vector<N>& x, const Vector<N>& y) const {
    cplx acc = 0.0;
    for (int i = 0; i < N; ++i) {
      cplx row = 0.0;
      for (int j = 0; j < N; ++j) row += (*this)(i, j) * y[j];
      acc += std::conj(x[i]) * row;
    }
    return acc;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

template <int N>
Matrix<N> operator+(Matrix<N> x, const Matrix<N>& y) { return x += y; }
template <int N>
Matrix<N> operator-(Matrix<N> x, const Matrix<N>& y) { return x -= y; }
template <int N>
Matrix<N> operator*(cplx c, Matrix<N> x) { return x *= c; }
template <int N>
Matrix<N> operator*(double c, Matrix<N> x) { return x *= c; }

template <int N>
Matrix<N> operator*(const Matrix<N>& x, const Matrix<N>& y) {
  Matrix<N> r;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      const cplx xik = x(i, k);
      for (int j = 0; j < N; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

template <int N>
Vector<N> operator*(const Matrix<N>& m, const Vector<N>& x) {
  Vector<N> r;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) r[i] += m(i, j) * x[j];
  return r;
}

template <int N>
Matrix<N> commutator(const Matrix<N>& x, const Matrix<N>& y) {
  return x * y - y * x;
}

/// Tr[x y] without forming the product.
template <int N>
cplx trace_product(const Matrix<N>& x, const Matrix<N>& y) {
  cplx acc = 0.0;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) acc += x(i, k) * y(k, i);
  return acc;
}

/// Pauli and spin-1 matrices in the standard basis (S_z diagonal, descending m).
namespace pauli {
inline Matrix<2> x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Matrix<2> y() { return {0.0, -I, I, 0.0}; }
inline Matrix<2> z() { return {1.0, 0.0, 0.0, -1.0}; }
}  // namespace pauli

namespace spin1 {
inline Matrix<3> x() {
  const double r = 1.0 / std::sqrt(2.0);
  return {0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0};
}
inline Matrix<3> z() { return Matrix<3>::diagonal({1.0, 0.0, -1.0}); }
}  // namespace spin1

}  // namespace pumpdeck
