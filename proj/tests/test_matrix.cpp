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

TEST_CASE("pauli algebra", "[matrix]") {
  const auto x = pauli::x(), y = pauli::y(), z = pauli::z();
  CHECK((x * y - I * z).max_abs() == 0.0);
  CHECK((y * z - I * x).max_abs() == 0.0);
  CHECK((x * x - Matrix<2>::identity()).max_abs() == 0.0);
  CHECK((commutator(x, y) - 2.0 * I * z).max_abs() == 0.0);
  CHECK(x.is_hermitian());
  CHECK(y.is_hermitian());
}

TEST_CASE("spin-1 operators", "[matrix]") {
  const auto sx = spin1::x(), sz = spin1::z();
  // S_x^2 has eigenvalues {0, 1, 1}; trace 2.
  CHECK_THAT((sx * sx).trace().real(), WithinAbs(2.0, 1e-15));
  CHECK_THAT((sz * sz).trace().real(), WithinAbs(2.0, 1e-15));
  CHECK(sx.is_hermitian());
}

TEST_CASE("adjoint, trace and products", "[matrix]") {
  std::mt19937_64 rng(1);
  const auto a = oracle::random_hermitian<3>(rng);
  const auto b = oracle::random_hermitian<3>(rng);
  const Matrix<3> ab = a * b;
  CHECK((ab.adjoint() - b * a).max_abs() < 1e-15);
  CHECK(std::abs(trace_product(a, b) - ab.trace()) < 1e-14);
  CHECK(std::abs(ab.trace() - (b * a).trace()) < 1e-14);

  Vector<3> u, w;
  for (int i = 0; i < 3; ++i) {
    u[i] = cplx(i + 1.0, -0.5 * i);
    w[i] = cplx(0.3 * i, 1.0);
  }
  CHECK(std::abs(a.sandwich(u, w) - dot(u, Vector<3>(a * w))) < 1e-14);
  CHECK(std::abs(dot(u, w) - std::conj(dot(w, u))) < 1e-15);
  CHECK((Matrix<3>::outer(u, w).adjoint() - Matrix<3>::outer(w, u)).max_abs() < 1e-15);
}

TEST_CASE("vector arithmetic", "[matrix]") {
  Vector<2> a, b;
  a[0] = 1.0;
  a[1] = I;
  b[0] = 2.0;
  const Vector<2> c = 2.0 * a - b;
  CHECK(c[0] == cplx(0.0));
  CHECK(c[1] == cplx(0.0, 2.0));
  CHECK_THAT(a.norm(), WithinAbs(std::sqrt(2.0), 1e-15));
}

TEST_CASE("hermiticity tolerance", "[matrix]") {
  Matrix<2> m = pauli::x();
  m(0, 1) += 1e-9;
  CHECK_FALSE(m.is_hermitian());
  CHECK(m.is_hermitian(1e-8));
}
