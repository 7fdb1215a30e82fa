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

#include <numbers>

#include "oracles.hpp"

using namespace pumpdeck;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// H frozen in time: the sweep only sets the duration.
CustomModel<2> static_model(const Matrix<2>& h) {
  CustomModel<2> m;
  m.h = [h](double, double) { return h; };
  m.dhds = [](double, double) { return Matrix<2>::zero(); };
  return m;
}

Matrix<2> some_state() {
  Matrix<2> r;
  r(0, 0) = 0.7;
  r(1, 1) = 0.3;
  r(0, 1) = cplx(0.2, -0.3);
  r(1, 0) = std::conj(r(0, 1));
  return r;
}

}  // namespace

TEST_CASE("protocol endpoints and start rates", "[lindblad]") {
  const double u = 0.01;
  for (const auto& p : {PumpProtocol::linear(u, -1.0, 1.0), PumpProtocol::cosine(u), PumpProtocol::quadratic(u)}) {
    CHECK_THAT(p.s(p.t_start), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(p.s(p.t_end), WithinAbs(1.0, 1e-12));
    // ds/dt by central differences at an interior point
    const double t = p.t_start + 0.37 * p.duration();
    CHECK_THAT(p.ds_dt(t), WithinAbs((p.s(t + 1e-3) - p.s(t - 1e-3)) / 2e-3, 1e-9));
  }
  CHECK_THAT(PumpProtocol::linear(u, -1.0, 1.0).start_rate(), WithinAbs(u, 1e-15));
  CHECK_THAT(PumpProtocol::cosine(u).start_rate(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(PumpProtocol::quadratic(u).start_rate(), WithinRel(2.0 * std::numbers::sqrt2 * u, 1e-12));
  CHECK_THROWS_AS(PumpProtocol::linear(0.0), PumpError);
  CHECK_THROWS_AS(PumpProtocol::linear(1e-3, 1.0, 0.0), PumpError);
}

TEST_CASE("Lindblad generator is traceless and Hermiticity preserving", "[lindblad]") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto h = oracle::random_hermitian<3>(rng);
    const auto rho = oracle::random_density<3>(rng);
    const auto out = lindblad_rhs(h, h, Matrix<3>(h * h), rho, 0.8);
    CHECK(std::abs(out.trace()) < 1e-14);
    CHECK((out - out.adjoint()).max_abs() < 1e-14);
  }
}

TEST_CASE("unitary evolution under constant H", "[lindblad]") {
  std::mt19937_64 rng(4);
  const auto h = oracle::random_hermitian<2>(rng);
  const auto model = static_model(h);
  const auto p = PumpProtocol::linear(0.1, 0.0, 1.0);  // t in [0, 10]
  const auto traj = evolve(DensityMatrix<2>(some_state()), model, 0.0, p, 0.0, 0.005);
  const auto u = oracle::propagator(h, p.duration());
  const Matrix<2> exact = u * some_state() * u.adjoint();
  CHECK((traj.final_state - exact).max_abs() < 1e-8);
  // populations in the eigenbasis of H stay constant
  const auto f = eigendecompose(h);
  for (const auto& smp : traj.samples)
    CHECK_THAT(f.project(smp.rho)(0, 0).real(), WithinAbs(f.project(some_state())(0, 0).real(), 1e-9));
}

TEST_CASE("pure dephasing under constant H matches the closed form", "[lindblad]") {
  const Matrix<2> h = 0.8 * pauli::z() + 0.3 * pauli::x();
  const auto model = static_model(h);
  const auto p = PumpProtocol::linear(0.1, 0.0, 1.0);
  const double gamma = 0.6;
  const auto f = eigendecompose(h);
  const Matrix<2> rho0 = some_state();
  const auto traj = evolve(DensityMatrix<2>(rho0), model, 0.0, p, gamma, 0.005);
  const double t = p.duration();
  const Matrix<2> e0 = f.project(rho0), e1 = f.project(traj.final_state);
  const double g10 = f.gap(1, 0);
  const cplx expected = e0(1, 0) * std::polar(std::exp(-0.5 * gamma * g10 * g10 * t), -g10 * t);
  CHECK(std::abs(e1(1, 0) - expected) < 1e-8);
  CHECK_THAT(e1(0, 0).real(), WithinAbs(e0(0, 0).real(), 1e-10));
}

TEST_CASE("RK4 Richardson ratio", "[lindblad]") {
  const LandauZenerModel lz{1.0, {}};
  const auto p = PumpProtocol::linear(0.05, -1.0, 1.0);
  const auto rho0 = initial_lab_state(lz, InitialStateSpec::coherent({0.75, 0.25}), 0.0, -1.0);
  EvolveOptions o;
  o.record = false;
  o.check_health = false;
  auto run = [&](double h) { return evolve(rho0, lz, 0.0, p, 0.5, h, o).final_state; };
  const auto ref = run(0.4 / 32.0);
  const double e1 = (run(0.4) - ref).max_abs();
  const double e2 = (run(0.2) - ref).max_abs();
  const double e3 = (run(0.1) - ref).max_abs();
  CHECK_THAT(e1 / e2, WithinRel(16.0, 0.25));
  CHECK_THAT(e2 / e3, WithinRel(16.0, 0.25));
}

TEST_CASE("convergence check", "[lindblad]") {
  const QwzModel qwz{1.0, {}};
  const auto p = PumpProtocol::linear(0.05);
  const auto rho0 = initial_lab_state(qwz, InitialStateSpec::lower_band(), 0.7, 0.0);
  const double h = default_step(qwz, 0.7, p, 1.0);
  const auto good = convergence_check(rho0, qwz, 0.7, p, 1.0, h);
  CHECK(good.pass);
  CHECK(good.trace_distance <= 1e-8);
  const auto bad = convergence_check(rho0, qwz, 0.7, p, 1.0, 100.0 * h);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.note.empty());
}

TEST_CASE("health checks reject a blown-up step", "[lindblad]") {
  const QwzModel qwz{1.0, {}};
  const auto p = PumpProtocol::linear(0.05);
  const auto rho0 = initial_lab_state(qwz, InitialStateSpec::lower_band(), 0.7, 0.0);
  try {
    evolve(rho0, qwz, 0.7, p, 1.0, 2.0);
    FAIL("unstable step accepted");
  } catch (const PumpError& e) {
    CHECK(e.kind() == ErrorKind::StepTooLarge);
  }
  CHECK_THROWS_AS(evolve(rho0, qwz, 0.7, p, -1.0, 0.01), PumpError);
  EvolveOptions o;
  o.accumulate_current = true;
  const LandauZenerModel lz{1.0, {}};
  CHECK_THROWS_AS(evolve(DensityMatrix<2>(some_state()), lz, 0.0, PumpProtocol::linear(0.1, -1.0, 1.0), 0.1, 0.01, o),
                  PumpError);
}

TEST_CASE("trajectory invariants along a pumping run", "[lindblad]") {
  const QwzModel qwz{-0.5, {}};
  const auto p = PumpProtocol::linear(0.02);
  const auto init = InitialStateSpec::coherent({0.5, 0.5});
  const auto rho0 = initial_lab_state(qwz, init, 1.2, 0.0);
  const auto traj = evolve(rho0, qwz, 1.2, p, 0.7, default_step(qwz, 1.2, p, 0.7));
  CHECK(traj.samples.size() == static_cast<std::size_t>((traj.steps + traj.stride - 1) / traj.stride + 1));
  CHECK(traj.samples.size() <= 2002);
  CHECK(traj.samples.size() >= 1001);
  CHECK(traj.max_trace_drift <= 1e-8);
  CHECK(traj.max_hermiticity_error <= 1e-10);
  CHECK(traj.min_eigenvalue >= -1e-8);
  CHECK(traj.max_purity_increase <= kPurityTolerance);
  for (const auto& smp : traj.samples) REQUIRE(inspect_state(smp.rho).ok());
  CHECK_THAT(traj.samples.back().s, WithinAbs(2.0 * std::numbers::pi, 1e-12));
}

TEST_CASE("default step rule", "[lindblad]") {
  const LandauZenerModel lz{1.0, {}};
  const auto p = PumpProtocol::linear(1e-3, -1.0, 1.0);
  // max |E| = sqrt(2)/2 at the ends; gamma |A|^2 = 3 * 0.5
  CHECK_THAT(default_step(lz, 0.0, p, 3.0), WithinRel(0.05 / 1.5, 1e-12));
  CHECK_THAT(default_step(lz, 0.0, p, 0.0), WithinRel(0.05 / (0.5 * std::sqrt(2.0)), 1e-12));
}

TEST_CASE("current trace", "[lindblad]") {
  CHECK_THAT(current_trace(Matrix<2>(0.5 * Matrix<2>::identity()), pauli::x(), 1e-3), WithinAbs(0.0, 1e-15));
  // Hellmann-Feynman: eigenstate expectation of dH/dk is the band slope
  const QwzModel qwz{1.0, {}};
  const double k = 0.9, s = 2.2, v = 1e-3;
  const auto f = eigendecompose(qwz.hamiltonian(k, s));
  const Matrix<2> rho = Matrix<2>::outer(f.state(0), f.state(0));
  const double slope = (eigendecompose(qwz.hamiltonian(k + 1e-5, s)).energies[0] -
                        eigendecompose(qwz.hamiltonian(k - 1e-5, s)).energies[0]) /
                       2e-5;
  CHECK_THAT(current_trace(rho, qwz.dh_dk(k, s), v) * v, WithinAbs(slope, 1e-8));
  try {
    current_trace(rho, qwz.dh_dk(k, s), 0.0);
    FAIL("zero rate accepted");
  } catch (const PumpError& e) {
    CHECK(e.kind() == ErrorKind::ZeroSweepRate);
  }
}

TEST_CASE("off-diagonals settle to the adiabatic coherence", "[lindblad]") {
  const QwzModel qwz{1.0, {}};
  const double v = 1e-3, k = 0.4, end = 2.0 * std::numbers::pi;
  const auto p = PumpProtocol::linear(v);
  const auto init = InitialStateSpec::coherent({0.8, 0.2});
  const auto rho0 = initial_lab_state(qwz, init, k, 0.0);
  const auto frame = eigendecompose(qwz.hamiltonian(k, end));
  const double g = frame.gap(1, 0);
  const double coupling = std::abs(frame.project(qwz.dh_ds(k, end))(0, 1)) / g;
  EvolveOptions o;
  o.record = false;
  for (double gamma : {0.0, 1.0}) {
    const auto traj = evolve(rho0, qwz, k, p, gamma, default_step(qwz, k, p, gamma), o);
    const auto fin = frame.project(traj.final_state);
    // first order: v (p0 - p1) <0|d1> / (g sqrt(1 + Gamma^2)), Gamma = gamma g / 2
    const double dp = fin(0, 0).real() - fin(1, 1).real();
    const double big_gamma = 0.5 * gamma * g;
    const double expected = v * dp * coupling / (g * std::sqrt(1.0 + big_gamma * big_gamma));
    if (gamma > 0.0) {
      CHECK_THAT(std::abs(fin(0, 1)), WithinRel(expected, 0.02));
    } else {
      // without dephasing the pure state keeps its coherence
      CHECK_THAT(std::abs(fin(0, 1)), WithinAbs(0.4, 1e-3));
    }
  }
}
