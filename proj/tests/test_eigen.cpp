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

#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace pumpdeck;
using Catch::Matchers::WithinAbs;

namespace {

template <int N>
void check_frame(const Matrix<N>& h, const EigenFrame<N>& f, double tol) {
  // V diag(E) V^dagger reproduces H, V is unitary, energies ascend.
  const Matrix<N> rebuilt = f.vectors * Matrix<N>::diagonal(f.energies) * f.vectors.adjoint();
  CHECK((rebuilt - h).max_abs() < tol);
  CHECK((f.vectors.adjoint() * f.vectors - Matrix<N>::identity()).max_abs() < tol);
  for (int i = 0; i + 1 < N; ++i) CHECK(f.energies[i] < f.energies[i + 1]);
  // gauge: the largest-magnitude component of each eigenvector is real positive
  for (int m = 0; m < N; ++m) {
    const auto v = f.state(m);
    int pivot = 0;
    for (int i = 1; i < N; ++i)
      if (std::abs(v[i]) > std::abs(v[pivot]) + 1e-12) pivot = i;
    CHECK(v[pivot].imag() == 0.0);
    CHECK(v[pivot].real() > 0.0);
  }
}

}  // namespace

TEST_CASE("2x2 closed form reconstructs random Hermitian matrices", "[eigen]") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto h = oracle::random_hermitian<2>(rng);
    check_frame(h, eigendecompose(h), 1e-13);
  }
}

TEST_CASE("Jacobi reconstructs random 3x3 and 4x4 Hermitian matrices", "[eigen]") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto h3 = oracle::random_hermitian<3>(rng);
    check_frame(h3, eigendecompose(h3), 1e-12);
    const auto h4 = oracle::random_hermitian<4>(rng);
    check_frame(h4, eigendecompose(h4), 1e-12);
  }
}

TEST_CASE("Jacobi agrees with the 2x2 closed form", "[eigen]") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto h = oracle::random_hermitian<2>(rng);
    std::array<double, 2> e{};
    Matrix<2> v;
    detail::eigen_jacobi(h, e, v);
    const auto f = eigendecompose(h);
    CHECK_THAT(e[0], WithinAbs(f.energies[0], 1e-13));
    CHECK_THAT(e[1], WithinAbs(f.energies[1], 1e-13));
  }
}

TEST_CASE("spin-1 spectrum is 0 and +-sqrt(g0^2 + s^2)", "[eigen]") {
  for (double s : {-1.0, -0.3, 0.0, 0.7}) {
    const auto f = eigendecompose(SpinOneModel{1.0, {}}.hamiltonian(0.0, s));
    const double e = std::sqrt(1.0 + s * s);
    CHECK_THAT(f.energies[0], WithinAbs(-e, 1e-13));
    CHECK_THAT(f.energies[1], WithinAbs(0.0, 1e-13));
    CHECK_THAT(f.energies[2], WithinAbs(e, 1e-13));
  }
}

TEST_CASE("gauge rule: tie goes to the lowest index", "[eigen]") {
  Vector<2> v;
  v[0] = std::polar(1.0 / std::sqrt(2.0), 0.4);
  v[1] = std::polar(1.0 / std::sqrt(2.0), -1.1);
  const auto g = gauge_fix(v);
  CHECK(g[0].imag() == 0.0);
  CHECK(g[0].real() > 0.0);
  CHECK_THAT(std::arg(g[1]), WithinAbs(-1.5, 1e-14));
}

TEST_CASE("eigendecompose error paths", "[eigen]") {
  Matrix<2> bad = pauli::x();
  bad(0, 1) = 2.0;
  REQUIRE_THROWS_AS(eigendecompose(bad), PumpError);
  try {
    eigendecompose(bad);
  } catch (const PumpError& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
  try {
    eigendecompose(Matrix<3>::identity());
    FAIL("degenerate spectrum accepted");
  } catch (const PumpError& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSpectrum);
  }
  const auto f = eigendecompose(pauli::z());
  try {
    offdiag_coupling(f, pauli::x(), 1, 1);
    FAIL("diagonal coupling accepted");
  } catch (const PumpError& e) {
    CHECK(e.kind() == ErrorKind::DiagonalRequest);
  }
}

TEST_CASE("off-diagonal coupling matches finite-difference eigenvectors", "[eigen]") {
  const QwzModel qwz{1.0, {}};
  for (double k : {-2.1, 0.4, 1.3}) {
    for (double s : {0.2, 2.5, 4.0}) {
      const auto f = eigendecompose(qwz.hamiltonian(k, s));
      std::function<Matrix<2>(double)> along_s = [&](double x) { return qwz.hamiltonian(k, x); };
      std::function<Matrix<2>(double)> along_k = [&](double x) { return qwz.hamiltonian(x, s); };
      // <0|d_s 1> and <1|d_k 0>
      CHECK(std::abs(offdiag_coupling(f, qwz.dh_ds(k, s), 1, 0) - oracle::fd_ket_derivative<2>(along_s, s, 0, 1)) <
            1e-8);
      CHECK(std::abs(offdiag_coupling(f, qwz.dh_dk(k, s), 0, 1) - oracle::fd_ket_derivative<2>(along_k, k, 1, 0)) <
            1e-8);
    }
  }
  const SpinOneModel spin{1.0, {}};
  std::function<Matrix<3>(double)> h3 = [&](double x) { return spin.hamiltonian(0.0, x); };
  for (double s : {-0.8, 0.1, 0.9}) {
    const auto f = eigendecompose(h3(s));
    for (int m = 0; m < 3; ++m)
      for (int j = 0; j < 3; ++j)
        if (m != j)
          CHECK(std::abs(offdiag_coupling(f, spin.dh_ds(0.0, s), m, j) - oracle::fd_ket_derivative<3>(h3, s, j, m)) <
                1e-8);
  }
}

TEST_CASE("connection matrix collects all couplings", "[eigen]") {
  const QwzModel qwz{-0.5, {}};
  const auto f = eigendecompose(qwz.hamiltonian(0.3, 1.7));
  const Matrix<2> dh = qwz.dh_ds(0.3, 1.7);
  const Matrix<2> x = connection(f, f.project(dh));
  CHECK(x(0, 0) == cplx(0.0));
  CHECK(std::abs(x(0, 1) - offdiag_coupling(f, dh, 1, 0)) < 1e-15);
  CHECK(std::abs(x(1, 0) - offdiag_coupling(f, dh, 0, 1)) < 1e-15);
  // anti-Hermitian: <j|d m> = -conj(<m|d j>)
  CHECK(std::abs(x(0, 1) + std::conj(x(1, 0))) < 1e-14);
}
