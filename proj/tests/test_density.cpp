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
ErrorKind kind_of(const Matrix<2>& m) {
  try {
    DensityMatrix<2> d(m);
  } catch (const PumpError& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}
}  // namespace

TEST_CASE("density matrix validation", "[density]") {
  const Matrix<2> half = 0.5 * Matrix<2>::identity();
  REQUIRE_NOTHROW(DensityMatrix<2>(half));
  CHECK(kind_of(Matrix<2>::identity()) == ErrorKind::InvalidState);  // trace 2
  CHECK(kind_of(Matrix<2>::diagonal({1.2, -0.2})) == ErrorKind::InvalidState);
  Matrix<2> skew = half;
  skew(0, 1) = 0.1;
  CHECK(kind_of(skew) == ErrorKind::InvalidState);
}

TEST_CASE("pure states and basis round trip", "[density]") {
  std::mt19937_64 rng(5);
  const auto h = oracle::random_hermitian<3>(rng);
  const auto frame = eigendecompose(h);
  const auto rho = DensityMatrix<3>(oracle::random_density<3>(rng));
  const auto eig = rho.to_eigen(frame);
  CHECK(eig.basis() == Basis::Eigen);
  CHECK((eig.to_lab(frame).matrix() - rho.matrix()).max_abs() < 1e-14);

  Vector<3> psi;
  psi[0] = 0.6;
  psi[2] = cplx(0.0, 0.8);
  const auto pure = DensityMatrix<3>::pure(psi);
  CHECK_THAT(inspect_state(pure.matrix()).purity, WithinAbs(1.0, 1e-15));
  CHECK_THAT(inspect_state(pure.matrix()).min_eigenvalue, WithinAbs(0.0, 1e-14));
}

TEST_CASE("trace distance", "[density]") {
  const Matrix<2> up = Matrix<2>::diagonal({1.0, 0.0});
  const Matrix<2> down = Matrix<2>::diagonal({0.0, 1.0});
  CHECK_THAT(trace_distance(up, down), WithinAbs(1.0, 1e-15));
  CHECK_THAT(trace_distance(up, up), WithinAbs(0.0, 1e-15));
  // pure states: sqrt(1 - |<a|b>|^2)
  const Matrix<2> plus = 0.5 * (Matrix<2>::identity() + pauli::x());
  CHECK_THAT(trace_distance(up, plus), WithinAbs(std::sqrt(0.5), 1e-14));
}

TEST_CASE("hermitian eigenvalues ascend", "[density]") {
  const auto e = hermitian_eigenvalues(Matrix<3>::diagonal({0.5, -1.0, 2.0}));
  CHECK(e[0] == -1.0);
  CHECK(e[2] == 2.0);
}
