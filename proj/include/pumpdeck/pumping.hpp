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

// Pumped charge over one adiabatic cycle on the (k, s) torus:
//
//   Q = 1/(2 pi) int dk int ds f_ks,   f_ks = Tr[rho(s) dH/dk] / v
//
// split to first order in v into four v-independent subterms
//
//   f_a = 2 sum_{j, m != j} rho_jj(0) Gamma_mj Re[<d_k j|m><m|d_s j>] / (Gamma_mj^2 + 1)
//   f_b = 2 sum_{j, m != j} rho_jj(0)          Im[<d_k j|m><m|d_s j>] / (Gamma_mj^2 + 1)
//   f_c = -2 sum_{j, m != j} dE_j/dk(s) Re[rho_mj(0) C_jm(0)],
//         C_jm = <j|dH/ds|m> / (g_mj (gamma_mj + i g_mj))
//   f_d = 1/(2 pi) sum_{j, m != j} rho_mj(0) <j|dH/dk|m>(0) / (gamma_mj(0) + i g_mj(0))
//
// and, independently, by brute-force Lindblad evolution at every k.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "pumpdeck/density.hpp"
#include "pumpdeck/eigen.hpp"
#include "pumpdeck/errors.hpp"
#include "pumpdeck/lindblad.hpp"
#include "pumpdeck/matrix.hpp"
#include "pumpdeck/models.hpp"
#include "pumpdeck/parallel.hpp"
#include "pumpdeck/perturbation.hpp"
#include "pumpdeck/quadrature.hpp"

namespace pumpdeck {

/// Initial state at every k, expressed in the instantaneous eigenbasis of
/// H_k(s_start) (ascending energy, library gauge).
///
/// BandFilled: diagonal populations `weights`.
/// CoherentSuperposition: pure state with amplitudes
///   sqrt(w_j) exp(i (c_j k + phi_j)),
/// c_j an integer winding and phi_j a constant phase. Weights do not depend on
/// k, so band populations are even in k by construction.
struct InitialStateSpec {
  enum class Kind { BandFilled, CoherentSuperposition };
  Kind kind = Kind::BandFilled;
  std::vector<double> weights{1.0, 0.0};
  std::vector<int> windings;
  std::vector<double> phases;

  static InitialStateSpec band_filled(std::vector<double> populations) {
    return {Kind::BandFilled, std::move(populations), {}, {}};
  }
  static InitialStateSpec lower_band(int bands = 2) {
    std::vector<double> w(bands, 0.0);
    w[0] = 1.0;
    return band_filled(std::move(w));
  }
  static InitialStateSpec coherent(std::vector<double> weights, std::vector<int> windings = {},
                                   std::vector<double> phases = {}) {
    return {Kind::CoherentSuperposition, std::move(weights), std::move(windings), std::move(phases)};
  }

  void validate(int bands) const {
    if (static_cast<int>(weights.size()) != bands) {
      throw PumpError(ErrorKind::InvalidArgument, "initial state needs one weight per band");
    }
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw PumpError(ErrorKind::InvalidArgument, "initial weights must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw PumpError(ErrorKind::InvalidArgument, "initial weights must sum to 1");
    }
    if (!windings.empty() && static_cast<int>(windings.size()) != bands) {
      throw PumpError(ErrorKind::InvalidArgument, "winding list must match band count");
    }
    if (!phases.empty() && static_cast<int>(phases.size()) != bands) {
      throw PumpError(ErrorKind::InvalidArgument, "phase list must match band count");
    }
  }

  bool has_coherence() const {
    if (kind == Kind::BandFilled) return false;
    int occupied = 0;
    for (double w : weights) occupied += (w > 0.0);
    return occupied > 1;
  }

  template <int N>
  Matrix<N> eigen_density(double k) const {
    validate(N);
    if (kind == Kind::BandFilled) {
      std::array<double, N> d{};
      for (int j = 0; j < N; ++j) d[j] = weights[j];
      return Matrix<N>::diagonal(d);
    }
    Vector<N> psi;
    for (int j = 0; j < N; ++j) {
      const double phase = (windings.empty() ? 0.0 : windings[j] * k) + (phases.empty() ? 0.0 : phases[j]);
      psi[j] = std::sqrt(weights[j]) * std::polar(1.0, phase);
    }
    return Matrix<N>::outer(psi, psi);
  }

  template <int N>
  std::array<double, N> populations(double /*k*/) const {
    validate(N);
    std::array<double, N> p{};
    for (int j = 0; j < N; ++j) p[j] = weights[j];
    return p;
  }
};

/// Lab-basis initial state at k, built on the gauge-fixed eigenframe at s.
template <PumpModel M>
DensityMatrix<M::dim> initial_lab_state(const M& model, const InitialStateSpec& spec, double k, double s) {
  const auto frame = eigendecompose(model.hamiltonian(k, s));
  return DensityMatrix<M::dim>(frame.unproject(spec.template eigen_density<M::dim>(k)), Basis::Lab);
}

/// Uniform (k, s) grid: k symmetric on the circle (contains 0 and every +-k
/// pair), s closed on [s_start, s_end] for Simpson.
struct PumpGrid {
  int n_k = 201;
  int n_s = 201;

  std::vector<double> k_points() const { return quad::symmetric_k_grid(n_k); }
  std::vector<double> s_points(double s0 = 0.0, double s1 = 2.0 * std::numbers::pi) const {
    return quad::closed_grid(s0, s1, n_s);
  }
};

/// Everything the four subterms need at one (k, s) point, in one frame.
template <int N>
struct PointGeometry {
  EigenFrame<N> frame;
  Matrix<N> dk;  // <i|dH/dk|j>
  Matrix<N> ds;  // <i|dH/ds|j>
  DephasingRates<N> rates;

  /// <m|d_lambda j> = <m|dH|j> / (E_j - E_m)
  cplx ket_derivative(const Matrix<N>& proj, int m, int j) const { return proj(m, j) / frame.gap(j, m); }
  /// <d_k j|m><m|d_s j>
  cplx geometric_product(int j, int m) const {
    return std::conj(ket_derivative(dk, m, j)) * ket_derivative(ds, m, j);
  }
  double band_velocity(int j) const { return dk(j, j).real(); }
};

/// Multiplies every eigenvector by a pseudo-random phase derived from
/// (seed, k, s). Physical outputs must not notice.
template <int N>
EigenFrame<N> scramble_gauge(EigenFrame<N> frame, std::uint64_t seed, double k, double s) {
  std::uint64_t x = seed ^ (std::hash<double>{}(k) * 0x9E3779B97F4A7C15ull) ^ std::hash<double>{}(s + 17.0);
  for (int m = 0; m < N; ++m) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(x >> 11) * 0x1.0p-53;
    const cplx ph = std::polar(1.0, theta);
    for (int i = 0; i < N; ++i) frame.vectors(i, m) *= ph;
  }
  return frame;
}

template <PumpModel M>
PointGeometry<M::dim> point_geometry(const M& model, double k, double s, double gamma,
                                     std::optional<std::uint64_t> scramble = std::nullopt) {
  PointGeometry<M::dim> g;
  g.frame = eigendecompose(model.hamiltonian(k, s));
  if (scramble) g.frame = scramble_gauge(g.frame, *scramble, k, s);
  if constexpr (requires { model.dh_dk(k, s); }) {
    g.dk = g.frame.project(model.dh_dk(k, s));
  } else {
    throw PumpError(ErrorKind::InvalidArgument, "pumping needs a k-dependent model");
  }
  g.ds = g.frame.project(model.dh_ds(k, s));
  g.rates = dephasing_rates(model, g.frame, gamma, k, s);
  return g;
}

template <int N>
double subterm_a(const PointGeometry<N>& g, const std::type_identity_t<std::array<double, N>>& populations) {
  double acc = 0.0;
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      if (m == j || populations[j] == 0.0) continue;
      const double r = g.rates.ratio[m][j];
      acc += populations[j] * r * g.geometric_product(j, m).real() / (r * r + 1.0);
    }
  return 2.0 * acc;
}

template <int N>
double subterm_b(const PointGeometry<N>& g, const std::type_identity_t<std::array<double, N>>& populations) {
  double acc = 0.0;
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      if (m == j || populations[j] == 0.0) continue;
      const double r = g.rates.ratio[m][j];
      acc += populations[j] * g.geometric_product(j, m).imag() / (r * r + 1.0);
    }
  return 2.0 * acc;
}

/// R_j = sum_{m != j} Re[rho_mj(0) C_jm(0)] from the geometry at the start of
/// the sweep; f_c(s) = -2 sum_j dE_j/dk(s) R_j.
template <int N>
std::array<double, N> coherence_weights(const PointGeometry<N>& g0, const Matrix<N>& rho0) {
  std::array<double, N> w{};
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      if (m == j) continue;
      const double gap = g0.frame.gap(m, j);
      const cplx c = g0.ds(j, m) / (gap * cplx(g0.rates.rate[m][j], gap));
      w[j] += (rho0(m, j) * c).real();
    }
  return w;
}

template <int N>
double subterm_c(const PointGeometry<N>& g, const std::type_identity_t<std::array<double, N>>& weights,
                 double rate_factor = 1.0) {
  double acc = 0.0;
  for (int j = 0; j < N; ++j) acc += g.band_velocity(j) * weights[j];
  return -2.0 * rate_factor * acc;
}

/// Boundary current of the initial coherence, spread uniformly over a cycle
/// of length `cycle` so that its s-integral counts it exactly once.
template <int N>
double subterm_d(const PointGeometry<N>& g0, const Matrix<N>& rho0, double cycle = 2.0 * std::numbers::pi) {
  cplx acc = 0.0;
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      if (m == j) continue;
      acc += rho0(m, j) * g0.dk(j, m) / cplx(g0.rates.rate[m][j], g0.frame.gap(m, j));
    }
  if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, std::abs(acc.real()))) {
    throw PumpError(ErrorKind::InvalidState, "f_d has an imaginary residue; rho0 is not Hermitian");
  }
  return acc.real() / cycle;
}

// Model-level forms of the four subterms.

template <PumpModel M>
double subterm_a(double k, double s, const M& model, double gamma, const std::array<double, M::dim>& pops) {
  return subterm_a(point_geometry(model, k, s, gamma), pops);
}
template <PumpModel M>
double subterm_b(double k, double s, const M& model, double gamma, const std::array<double, M::dim>& pops) {
  return subterm_b(point_geometry(model, k, s, gamma), pops);
}
template <PumpModel M>
double subterm_c(double k, double s, const M& model, double gamma, const Matrix<M::dim>& rho0,
                 const PumpProtocol& protocol) {
  const auto g0 = point_geometry(model, k, protocol.s_start, gamma);
  const double factor = protocol.start_rate() / protocol.mean_rate();
  return subterm_c(point_geometry(model, k, s, gamma), coherence_weights(g0, rho0), factor);
}
template <PumpModel M>
double subterm_d(double k, const M& model, double gamma, const Matrix<M::dim>& rho0,
                 const PumpProtocol& protocol) {
  return subterm_d(point_geometry(model, k, protocol.s_start, gamma), rho0,
                   protocol.s_end - protocol.s_start);
}

/// Geometry of the lower band of a two-band model: metric components and
/// Berry curvature Omega_ks = 2 Im <d_k psi|d_s psi>.
struct BandGeometry {
  double g_ks = 0.0;
  double omega_ks = 0.0;
  double g_kk = 0.0;
  double g_ss = 0.0;
};

template <PumpModel M>
BandGeometry quantum_metric_and_curvature(double k, double s, const M& model) {
  if constexpr (M::dim != 2) {
    throw PumpError(ErrorKind::NotTwoBand, "metric/curvature reduction needs a two-band model");
  } else {
    const auto frame = eigendecompose(model.hamiltonian(k, s));
    const cplx a = offdiag_coupling(frame, model.dh_dk(k, s), 0, 1);  // <2|d_k 1>
    const cplx b = offdiag_coupling(frame, model.dh_ds(k, s), 0, 1);  // <2|d_s 1>
    const cplx p = std::conj(a) * b;
    return {2.0 * p.real(), 2.0 * p.imag(), 2.0 * std::norm(a), 2.0 * std::norm(b)};
  }
}

/// (1/2 pi) times the torus integral of the band's Berry curvature
/// (periodic trapezoid in k, Simpson in s).
template <PumpModel M>
double curvature_integral(const M& model, const PumpGrid& grid, int band = 0) {
  constexpr int N = M::dim;
  const auto ks = grid.k_points();
  const auto ss = grid.s_points();
  const auto ws = quad::simpson_weights(grid.n_s, 2.0 * std::numbers::pi);
  double acc = 0.0;
  for (double k : ks)
    for (int i = 0; i < grid.n_s; ++i) {
      const auto g = point_geometry(model, k, ss[i], 0.0);
      std::array<double, N> p{};
      p[band] = 1.0;
      acc += ws[i] * subterm_b(g, p);
    }
  return acc / static_cast<double>(grid.n_k);
}

/// Lattice Chern number of one band from gauge-invariant plaquette phases
/// (link-variable method) on an n_k x n_s periodic grid over [-pi, pi) x [0, 2 pi).
/// Orientation matches (1/2 pi) int Omega_ks with Omega_ks = 2 Im <d_k psi|d_s psi>.
template <PumpModel M>
int chern_number(const M& model, int n_k = 101, int n_s = 101, int band = 0) {
  constexpr int N = M::dim;
  model.validate();
  std::vector<Vector<N>> states(static_cast<std::size_t>(n_k) * n_s);
  auto at = [&](int i, int j) -> const Vector<N>& { return states[((i % n_k) * n_s) + (j % n_s)]; };
  for (int i = 0; i < n_k; ++i)
    for (int j = 0; j < n_s; ++j) {
      const double k = -std::numbers::pi + 2.0 * std::numbers::pi * i / n_k;
      const double s = 2.0 * std::numbers::pi * j / n_s;
      states[i * n_s + j] = eigendecompose(model.hamiltonian(k, s)).state(band);
    }
  auto link = [](const Vector<N>& a, const Vector<N>& b) {
    const cplx u = dot(a, b);
    return u / std::abs(u);
  };
  double total = 0.0;
  for (int i = 0; i < n_k; ++i)
    for (int j = 0; j < n_s; ++j) {
      const cplx plaquette = link(at(i, j), at(i + 1, j)) * link(at(i + 1, j), at(i + 1, j + 1)) *
                             link(at(i + 1, j + 1), at(i, j + 1)) * link(at(i, j + 1), at(i, j));
      total += std::arg(plaquette);
    }
  const double c = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(c);
  if (std::abs(c - rounded) > 1e-6) {
    std::ostringstream os;
    os << "plaquette sum " << c << " is not an integer; refine the grid";
    throw PumpError(ErrorKind::NonIntegerResult, os.str());
  }
  return static_cast<int>(rounded);
}

struct PumpFlags {
  bool symmetry_violation = false;
  bool zero_dephasing = false;
  bool experimental_protocol = false;
  bool non_cancellation = false;

  std::string to_string() const {
    std::string out;
    auto add = [&](bool on, const char* name) {
      if (!on) return;
      if (!out.empty()) out += '|';
      out += name;
    };
    add(symmetry_violation, "symmetry_violation");
    add(zero_dephasing, "zero_dephasing");
    add(experimental_protocol, "experimental_protocol");
    add(non_cancellation, "non_cancellation");
    return out.empty() ? "none" : out;
  }
};

struct PumpBreakdown {
  double q_a = 0.0, q_b = 0.0, q_c = 0.0, q_d = 0.0;
  double q_theory = 0.0;
  std::optional<double> q_numeric;
  double gamma = 0.0;
  double v = 0.0;
  /// (1/2 pi) int dk int ds sum_j rho_jj(0) dE_j/dk / v: the large band-velocity
  /// term that must cancel between +-k.
  double band_velocity_residual = 0.0;
  PumpFlags flags;
  SymmetryDiagnostic symmetry;
  // Per-(k, s) fields, row-major over (k, s), kept only on request.
  std::vector<double> f_a, f_b, f_c, f_d;
};

struct TheoryOptions {
  bool keep_fields = false;
  std::optional<std::uint64_t> gauge_scramble;
  int workers = 1;
};

/// Integrates the four subterms over the grid: periodic trapezoid in k,
/// Simpson in s. The sweep rate never enters except through the protocol's
/// start/mean rate ratio for f_c.
template <PumpModel M>
PumpBreakdown pumped_charge_theory(const M& model, const InitialStateSpec& initial, double gamma,
                                   const PumpProtocol& protocol, const PumpGrid& grid,
                                   const TheoryOptions& options = {}) {
  constexpr int N = M::dim;
  if (!model_has_k(model)) throw PumpError(ErrorKind::InvalidArgument, "pumping needs a k-dependent model");
  model.validate();
  initial.validate(N);
  if (gamma < 0.0) throw PumpError(ErrorKind::InvalidArgument, "gamma must be non-negative");

  PumpBreakdown out;
  out.gamma = gamma;
  out.v = protocol.rate;
  const auto ks = grid.k_points();
  const auto ss = grid.s_points(protocol.s_start, protocol.s_end);
  const double cycle = protocol.s_end - protocol.s_start;
  const auto ws = quad::simpson_weights(grid.n_s, cycle);
  const double rate_factor = protocol.start_rate() / protocol.mean_rate();

  std::vector<double> s_probe;
  for (int i = 0; i < grid.n_s; i += std::max(1, grid.n_s / 8)) s_probe.push_back(ss[i]);
  out.symmetry = validate_k_symmetry(
      model, [&](double k) { return initial.template populations<N>(k); }, ks, s_probe);
  out.flags.symmetry_violation = !out.symmetry.ok();
  out.flags.zero_dephasing = (gamma == 0.0) && initial.has_coherence();
  out.flags.experimental_protocol = protocol.kind != ProtocolKind::Linear && initial.has_coherence();

  struct Row {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0, velocity = 0.0;
    std::vector<double> fa, fb, fc, fd;
  };
  auto row = [&](std::size_t ik) {
    const double k = ks[ik];
    Row r;
    const auto g0 = point_geometry(model, k, protocol.s_start, gamma, options.gauge_scramble);
    // The physical initial state is defined on the gauge-fixed frame and then
    // re-expressed in whatever frame the formulas see.
    const auto fixed0 = eigendecompose(model.hamiltonian(k, protocol.s_start));
    const Matrix<N> rho_lab = fixed0.unproject(initial.template eigen_density<N>(k));
    const Matrix<N> rho0 = g0.frame.project(rho_lab);
    std::array<double, N> pops{};
    for (int j = 0; j < N; ++j) pops[j] = rho0(j, j).real();
    const auto cw = coherence_weights(g0, rho0);
    const double fd = subterm_d(g0, rho0, cycle);
    if (options.keep_fields) {
      r.fa.resize(grid.n_s);
      r.fb.resize(grid.n_s);
      r.fc.resize(grid.n_s);
      r.fd.assign(grid.n_s, fd);
    }
    for (int i = 0; i < grid.n_s; ++i) {
      const auto g = point_geometry(model, k, ss[i], gamma, options.gauge_scramble);
      const double fa = subterm_a(g, pops);
      const double fb = subterm_b(g, pops);
      const double fc = subterm_c(g, cw, rate_factor);
      double vel = 0.0;
      for (int j = 0; j < N; ++j) vel += pops[j] * g.band_velocity(j);
      r.a += ws[i] * fa;
      r.b += ws[i] * fb;
      r.c += ws[i] * fc;
      r.d += ws[i] * fd;
      r.velocity += ws[i] * vel;
      if (options.keep_fields) {
        r.fa[i] = fa;
        r.fb[i] = fb;
        r.fc[i] = fc;
      }
    }
    return r;
  };
  const auto rows = parallel_map(ks.size(), options.workers, row);

  // k weights are 2 pi / n_k, so (1/2 pi) sum_k w_k reduces to a plain mean.
  const double norm = 1.0 / static_cast<double>(grid.n_k);
  for (const auto& r : rows) {
    out.q_a += r.a;
    out.q_b += r.b;
    out.q_c += r.c;
    out.q_d += r.d;
    out.band_velocity_residual += r.velocity;
    if (options.keep_fields) {
      out.f_a.insert(out.f_a.end(), r.fa.begin(), r.fa.end());
      out.f_b.insert(out.f_b.end(), r.fb.begin(), r.fb.end());
      out.f_c.insert(out.f_c.end(), r.fc.begin(), r.fc.end());
      out.f_d.insert(out.f_d.end(), r.fd.begin(), r.fd.end());
    }
  }
  out.q_a *= norm;
  out.q_b *= norm;
  out.q_c *= norm;
  out.q_d *= norm;
  out.band_velocity_residual *= norm / protocol.mean_rate();
  out.q_theory = out.q_a + out.q_b + out.q_c + out.q_d;
  return out;
}

struct NumericOptions {
  double step = 0.0;           // fixed step; 0 picks default_step(step_factor) per k
  double step_factor = 0.05;
  int workers = 1;
  bool check_health = true;
  int max_halvings = 4;  // per-k retries after a failed health check
};

struct StepCalibration {
  double step_factor = 0.0;
  std::vector<ConvergenceReport> probes;  // final (passing) report per probe k
  int halvings = 0;
};

/// Largest factor (starting at `start`, halving) for which runs at h and h/2
/// agree within kConvergenceTolerance at every probe k, with h from
/// default_step(factor).
template <PumpModel M>
StepCalibration calibrate_step(const M& model, const InitialStateSpec& initial, double gamma,
                               const PumpProtocol& protocol, const std::vector<double>& probe_k,
                               double start = 1.0, int max_halvings = 8) {
  StepCalibration cal;
  double factor = start;
  for (int attempt = 0; attempt <= max_halvings; ++attempt, factor *= 0.5) {
    cal.probes.clear();
    bool ok = true;
    for (double k : probe_k) {
      const auto rho0 = initial_lab_state(model, initial, k, protocol.s_start);
      const double h = default_step(model, k, protocol, gamma, factor);
      cal.probes.push_back(convergence_check(rho0, model, k, protocol, gamma, h));
      if (!cal.probes.back().pass) {
        ok = false;
        break;
      }
    }
    if (ok) {
      cal.step_factor = factor;
      cal.halvings = attempt;
      return cal;
    }
  }
  throw PumpError(ErrorKind::StepTooLarge, "no step factor down to " + std::to_string(factor * 2.0) +
                                               " passes the convergence check: " + cal.probes.back().note);
}

struct NumericPump {
  double q = 0.0;
  std::vector<double> k_points;
  std::vector<double> current_integrals;  // int Tr[rho_k dH/dk] dt per k
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
  double max_purity_increase = 0.0;
  double max_final_coherence = 0.0;  // largest |rho_mj| in the final eigenframe
  double smallest_step = 0.0;
  bool non_cancellation = false;
};

/// Q from per-k Lindblad runs: (1/2 pi) sum_k w_k int Tr[rho_k(t) dH/dk(s(t))] dt.
/// The large band-velocity parts cancel between +-k only after the k sum.
template <PumpModel M>
NumericPump pumped_charge_numeric(const M& model, const InitialStateSpec& initial, double gamma,
                                  const PumpProtocol& protocol, const PumpGrid& grid,
                                  const NumericOptions& options = {}) {
  constexpr int N = M::dim;
  model.validate();
  initial.validate(N);
  NumericPump out;
  out.k_points = grid.k_points();

  struct KRun {
    double integral = 0.0, drift = 0.0, min_eig = 1.0, purity_up = 0.0, coherence = 0.0, step = 0.0;
  };
  auto run = [&](std::size_t ik) {
    const double k = out.k_points[ik];
    const auto rho0 = initial_lab_state(model, initial, k, protocol.s_start);
    double step =
        options.step > 0.0 ? options.step : default_step(model, k, protocol, gamma, options.step_factor);
    EvolveOptions eo;
    eo.record = false;
    eo.accumulate_current = true;
    eo.check_health = options.check_health;
    // a k between the calibration probes may still lose positivity; halve locally
    Trajectory<N> traj;
    for (int attempt = 0;; ++attempt) {
      try {
        traj = evolve(rho0, model, k, protocol, gamma, step, eo);
        break;
      } catch (const PumpError& e) {
        if (e.kind() != ErrorKind::StepTooLarge || attempt >= options.max_halvings) throw;
        step *= 0.5;
      }
    }
    KRun r;
    r.integral = traj.current_integral;
    r.drift = traj.max_trace_drift;
    r.min_eig = traj.min_eigenvalue;
    r.purity_up = traj.max_purity_increase;
    r.step = traj.step;
    const auto fin = eigendecompose(model.hamiltonian(k, protocol.s_end)).project(traj.final_state);
    for (int m = 0; m < N; ++m)
      for (int j = 0; j < N; ++j)
        if (m != j) r.coherence = std::max(r.coherence, std::abs(fin(m, j)));
    return r;
  };
  const auto runs = parallel_map(out.k_points.size(), options.workers, run);
  out.smallest_step = INFINITY;
  for (const auto& r : runs) {
    out.current_integrals.push_back(r.integral);
    out.q += r.integral;
    out.max_trace_drift = std::max(out.max_trace_drift, r.drift);
    out.min_eigenvalue = std::min(out.min_eigenvalue, r.min_eig);
    out.max_purity_increase = std::max(out.max_purity_increase, r.purity_up);
    out.max_final_coherence = std::max(out.max_final_coherence, r.coherence);
    out.smallest_step = std::min(out.smallest_step, r.step);
  }
  out.q /= static_cast<double>(grid.n_k);
  return out;
}

/// Flags the numeric result when the odd-in-k band-velocity residual is more
/// than 10% of the pumped charge.
inline bool non_cancellation(const PumpBreakdown& theory, double q_numeric) {
  return std::abs(theory.band_velocity_residual) > 0.1 * std::abs(q_numeric);
}

}  // namespace pumpdeck
