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

// First-order (in the sweep rate) adiabatic perturbation theory under pure
// dephasing: interband coherence along the sweep and the net population
// transfer between the start and the end of a protocol.

#include <array>
#include <cmath>
#include <numbers>
#include <type_traits>
#include <vector>

#include "pumpdeck/eigen.hpp"
#include "pumpdeck/errors.hpp"
#include "pumpdeck/lindblad.hpp"
#include "pumpdeck/matrix.hpp"
#include "pumpdeck/models.hpp"
#include "pumpdeck/quadrature.hpp"

namespace pumpdeck {

/// gamma_mj = gamma/2 (A_m - A_j)^2 (symmetric) and Gamma_mj = gamma_mj / g_mj
/// (antisymmetric) at one point of the sweep.
template <int N>
struct DephasingRates {
  double gamma = 0.0;
  std::array<std::array<double, N>, N> rate{};
  std::array<std::array<double, N>, N> ratio{};

  static DephasingRates from_levels(double gamma, const EigenFrame<N>& frame,
                                    const std::array<double, N>& levels) {
    DephasingRates r;
    r.gamma = gamma;
    for (int m = 0; m < N; ++m)
      for (int j = 0; j < N; ++j) {
        const double d = levels[m] - levels[j];
        r.rate[m][j] = 0.5 * gamma * d * d;
        r.ratio[m][j] = (m == j) ? 0.0 : r.rate[m][j] / frame.gap(m, j);
      }
    return r;
  }
};

/// Rates at (k, s) for a model, using its dephasing operator's eigenvalues.
template <PumpModel M>
DephasingRates<M::dim> dephasing_rates(const M& model, const EigenFrame<M::dim>& frame, double gamma,
                                       double k, double s) {
  std::array<double, M::dim> levels{};
  for (int m = 0; m < M::dim; ++m) levels[m] = dephasing_level(model, frame, k, s, m);
  return DephasingRates<M::dim>::from_levels(gamma, frame, levels);
}

/// rho_mj to first order in the sweep rate:
///   v (rho_dot_mj + [rho_jj - rho_mm] <m|d/ds|j>) / (-i g_mj - gamma_mj)
template <int N>
cplx offdiag_first_order(const EigenFrame<N>& frame, const Matrix<N>& dh_ds,
                         const std::type_identity_t<std::array<double, N>>& populations, cplx rho_dot_mj,
                         const DephasingRates<N>& rates, double v_local, int m, int j) {
  const cplx coupling = offdiag_coupling(frame, dh_ds, j, m);  // <m|d/ds|j>
  const cplx numer = rho_dot_mj + (populations[j] - populations[m]) * coupling;
  const cplx denom = cplx(-rates.rate[m][j], -frame.gap(m, j));
  return v_local * numer / denom;
}

struct TransitionReport {
  std::vector<double> delta_p;          // per level, ascending energy
  std::vector<double> coherence_part;
  std::vector<double> population_part;
  ProtocolKind protocol = ProtocolKind::Linear;
  double v_start = 0.0;
  double quadrature_change = 0.0;  // |refined - coarse| of the population integrals
  bool zero_dephasing = false;     // gamma == 0: the boundary-term premise does not hold
};

/// Net population change of every level between s_start and s_end to first
/// order in the sweep rate. `rho0` is the initial state in the eigenbasis of
/// H(s_start). The population integral uses composite Simpson with
/// `quadrature_n` panels, refined once by doubling.
template <PumpModel M>
TransitionReport population_transfer(const M& model, const PumpProtocol& protocol,
                                     const Matrix<M::dim>& rho0, double gamma,
                                     int quadrature_n = 2000, double k = 0.0) {
  constexpr int N = M::dim;
  TransitionReport rep;
  rep.protocol = protocol.kind;
  rep.v_start = protocol.start_rate();
  rep.zero_dephasing = (gamma == 0.0);
  rep.delta_p.assign(N, 0.0);
  rep.coherence_part.assign(N, 0.0);
  rep.population_part.assign(N, 0.0);

  const double s0 = protocol.s_start;
  const auto frame0 = eigendecompose(model.hamiltonian(k, s0));
  const auto rates0 = dephasing_rates(model, frame0, gamma, k, s0);
  const Matrix<N> ds0 = frame0.project(model.dh_ds(k, s0));
  for (int j = 0; j < N; ++j) {
    double acc = 0.0;
    for (int m = 0; m < N; ++m) {
      if (m == j) continue;
      const double g = frame0.gap(m, j);
      const cplx c = ds0(j, m) / (g * cplx(rates0.rate[m][j], g));
      acc += 2.0 * (rho0(m, j) * c).real();
    }
    rep.coherence_part[j] = -rep.v_start * acc;
  }

  // B_jm(s) = |<j|dH/ds|m>|^2 gamma_mj / (g_mj^2 (gamma_mj^2 + g_mj^2)), all pairs at once.
  auto b_matrix = [&](double s) {
    const auto frame = eigendecompose(model.hamiltonian(k, s));
    const auto rates = dephasing_rates(model, frame, gamma, k, s);
    const Matrix<N> ds = frame.project(model.dh_ds(k, s));
    std::array<std::array<double, N>, N> b{};
    for (int j = 0; j < N; ++j)
      for (int m = 0; m < N; ++m) {
        if (m == j) continue;
        const double g = frame.gap(m, j);
        const double r = rates.rate[m][j];
        b[j][m] = std::norm(ds(j, m)) * r / (g * g * (r * r + g * g));
      }
    return b;
  };
  // Integral of v(s) B(s) ds. Linear sweeps integrate in s; curved ones in t,
  // where v(s) ds = (ds/dt)^2 dt stays finite at turning points.
  auto integrate = [&](int panels) {
    std::array<std::array<double, N>, N> acc{};
    const bool in_s = protocol.kind == ProtocolKind::Linear;
    const double a = in_s ? protocol.s_start : protocol.t_start;
    const double b = in_s ? protocol.s_end : protocol.t_end;
    const double h = (b - a) / panels;
    for (int i = 0; i <= panels; ++i) {
      const double x = (i == panels) ? b : a + i * h;
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      double scale = 0.0;
      double s = x;
      if (in_s) {
        scale = protocol.rate;
      } else {
        const double rate = protocol.ds_dt(x);
        scale = rate * rate;
        s = protocol.s(x);
      }
      const auto bm = b_matrix(s);
      for (int j = 0; j < N; ++j)
        for (int m = 0; m < N; ++m) acc[j][m] += w * scale * bm[j][m];
    }
    for (auto& row : acc)
      for (auto& x : row) x *= h / 3.0;
    return acc;
  };
  const auto coarse = integrate(quadrature_n);
  const auto fine = integrate(2 * quadrature_n);
  for (int j = 0; j < N; ++j) {
    double acc = 0.0;
    for (int m = 0; m < N; ++m) {
      if (m == j) continue;
      const double dp = rho0(j, j).real() - rho0(m, m).real();
      acc += dp * fine[j][m];
      rep.quadrature_change = std::max(rep.quadrature_change, std::abs(fine[j][m] - coarse[j][m]));
    }
    rep.population_part[j] = -2.0 * acc;
    rep.delta_p[j] = rep.coherence_part[j] + rep.population_part[j];
  }
  return rep;
}

/// Brute-force counterpart of population_transfer: evolves rho0 (eigenbasis of
/// H(s_start)) through the protocol and returns the change of every level's
/// population in the eigenbasis of H(s_end), ascending energy.
template <PumpModel M>
std::vector<double> evolved_population_change(const M& model, const PumpProtocol& protocol,
                                              const Matrix<M::dim>& rho0, double gamma, double step,
                                              double k = 0.0) {
  constexpr int N = M::dim;
  const auto frame0 = eigendecompose(model.hamiltonian(k, protocol.s_start));
  const DensityMatrix<N> lab(frame0.unproject(rho0), Basis::Lab);
  EvolveOptions opt;
  opt.record = false;
  const auto traj = evolve(lab, model, k, protocol, gamma, step, opt);
  const auto frame1 = eigendecompose(model.hamiltonian(k, protocol.s_end));
  const Matrix<N> fin = frame1.project(traj.final_state);
  std::vector<double> dp(N);
  for (int j = 0; j < N; ++j) dp[j] = fin(j, j).real() - rho0(j, j).real();
  return dp;
}

/// The two contributions to the Landau-Zener excited-state population change
/// for g0 = 1, s: -1 -> 1 at constant rate v, A = H, starting from the state
/// with amplitudes (sqrt(3)/2, 1/2) on the ground and excited states in the
/// real-eigenvector convention where <excited|sigma_z|ground> < 0 at s = -1.
/// In this library's gauge that is the state (sqrt(3)/2, -1/2).
struct LzClosedForm {
  double coherence = 0.0;
  double population = 0.0;
  double total() const { return coherence + population; }
};

inline LzClosedForm lz_closed_form_terms(double v, double gamma) {
  LzClosedForm r;
  r.coherence = -v * std::sqrt(3.0) * gamma / (8.0 * (gamma * gamma + 2.0));
  const double integral = quad::adaptive_simpson(
      [gamma](double th) {
        const double c2 = std::cos(th) * std::cos(th);
        return c2 * c2 / (gamma * gamma + 4.0 * c2);
      },
      -std::numbers::pi / 4.0, std::numbers::pi / 4.0, 1e-13);
  r.population = 0.5 * v * gamma * integral;
  return r;
}

inline double lz_transition_closed_form(double v, double gamma) {
  return lz_closed_form_terms(v, gamma).total();
}

/// Population-difference integral for the spin-1 sweep s: -1 -> 1 in closed form,
/// exactly as printed with the original source. It equals twice the integral
/// of B(s) between the top and middle levels over [-1, 1].
inline double three_level_d1_printed(double gamma, double g0) {
  const double q = std::sqrt(gamma * gamma * g0 * g0 + 4.0);
  const double g2 = g0 * g0;
  return 0.25 * gamma * g2 *
         ((2.0 - gamma * gamma * g2) * std::atan(1.0 / g0) / (g2 * g0) +
          gamma * gamma * gamma * std::atan(gamma / q) / q + 2.0 / (g2 * g2 + g2));
}

/// Coherence coefficient exactly as printed with the original source. Its
/// inner square root is negative at s0 = -1, so this evaluates to NaN there.
inline double three_level_d2_printed(double gamma, double g0, double s0, cplx rho12) {
  const double g1 = std::sqrt(g0 * g0 + (1.0 - 2.0 * s0) * (1.0 - 2.0 * s0));
  const double numer = 4.0 * std::numbers::sqrt2 * g0 *
                       (rho12.real() * gamma * g1 - 2.0 * rho12.imag()) * (g1 + 2.0 * s0 - 1.0);
  const double denom = g1 * g1 * g1 + (4.0 + gamma * gamma * g1 * g1) *
                                          std::sqrt(g1 * g1 + (2.0 * g1 + 1.0) * (2.0 * s0 - 1.0));
  return numer / denom;
}

/// Coherence coefficient of the spin-1 sweep from the boundary term at s0:
///   D2 = -2 sqrt(2) g0 (gamma E0 Re rho12 + 2 Im rho12) / (E0^3 (gamma^2 E0^2 + 4)),
/// E0 = sqrt(g0^2 + s0^2). Levels are labelled by descending energy (1 = top,
/// 2 = middle) with eigenvectors in this library's gauge.
inline double three_level_d2(double gamma, double g0, double s0, cplx rho12) {
  const double e0 = std::sqrt(g0 * g0 + s0 * s0);
  return -2.0 * std::numbers::sqrt2 * g0 * (gamma * e0 * rho12.real() + 2.0 * rho12.imag()) /
         (e0 * e0 * e0 * (gamma * gamma * e0 * e0 + 4.0));
}

/// Top-level population change for H = g0 S_x + s S_z swept s: -1 -> 1 at rate v:
///   -v [rho11 - rho22] D1 - v D2
/// with D1 as printed. The printed prefactor of the first term is -2v, which
/// double counts D1 (D1 already integrates 2 B); see three_level_d1_printed.
inline double three_level_transition_closed_form(double v, double gamma, double g0, double s0,
                                                 double s1, double rho11, double rho22, cplx rho12) {
  if (s0 != -1.0 || s1 != 1.0) {
    throw PumpError(ErrorKind::UnsupportedEndpoints, "three-level closed form requires s: -1 -> 1");
  }
  if (!(g0 > 0.0) || gamma < 0.0) {
    throw PumpError(ErrorKind::InvalidArgument, "three-level closed form needs g0 > 0, gamma >= 0");
  }
  return -v * (rho11 - rho22) * three_level_d1_printed(gamma, g0) -
         v * three_level_d2(gamma, g0, s0, rho12);
}

/// Same expression with the printed -2v prefactor and printed D2, kept to
/// document the discrepancy against brute-force evolution.
inline double three_level_transition_printed(double v, double gamma, double g0, double s0,
                                             double rho11, double rho22, cplx rho12) {
  return -2.0 * v * (rho11 - rho22) * three_level_d1_printed(gamma, g0) -
         v * three_level_d2_printed(gamma, g0, s0, rho12);
}

}  // namespace pumpdeck
