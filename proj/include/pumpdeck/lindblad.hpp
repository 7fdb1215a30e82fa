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
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pumpdeck/density.hpp"
#include "pumpdeck/eigen.hpp"
#include "pumpdeck/errors.hpp"
#include "pumpdeck/matrix.hpp"
#include "pumpdeck/models.hpp"

namespace pumpdeck {

enum class ProtocolKind { Linear, Cosine, Quadratic };

inline std::string to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::Linear: return "linear";
    case ProtocolKind::Cosine: return "cosine";
    case ProtocolKind::Quadratic: return "quadratic";
  }
  return "unknown";
}

/// The sweep t -> s(t) between s_start and s_end.
///
///   Linear     s = rate * t,                       t in [s_start, s_end] / rate
///   Cosine     s = c + a cos(rate * t),            t in [-pi / rate, 0]
///   Quadratic  s = s_end - a rate^2 t^2,           t in [-sqrt(2) / rate, 0]
///
/// with c, a the midpoint and half-width of [s_start, s_end].
/// For s_start = -1, s_end = 1 these are s = ut, s = cos(ut), s = 1 - u^2 t^2,
/// whose start rates are u, 0 and 2 sqrt(2) u.
struct PumpProtocol {
  ProtocolKind kind = ProtocolKind::Linear;
  double rate = 1e-3;
  double s_start = 0.0;
  double s_end = 2.0 * std::numbers::pi;
  double t_start = 0.0;
  double t_end = 0.0;

  static PumpProtocol make(ProtocolKind kind, double rate, double s_start, double s_end) {
    if (!(rate > 0.0)) throw PumpError(ErrorKind::InvalidArgument, "protocol rate must be positive");
    if (!(s_end > s_start)) throw PumpError(ErrorKind::InvalidArgument, "protocol needs s_end > s_start");
    PumpProtocol p{kind, rate, s_start, s_end, 0.0, 0.0};
    switch (kind) {
      case ProtocolKind::Linear:
        p.t_start = s_start / rate;
        p.t_end = s_end / rate;
        break;
      case ProtocolKind::Cosine:
        p.t_start = -std::numbers::pi / rate;
        p.t_end = 0.0;
        break;
      case ProtocolKind::Quadratic:
        p.t_start = -std::numbers::sqrt2 / rate;
        p.t_end = 0.0;
        break;
    }
    return p;
  }
  static PumpProtocol linear(double v, double s0 = 0.0, double s1 = 2.0 * std::numbers::pi) {
    return make(ProtocolKind::Linear, v, s0, s1);
  }
  static PumpProtocol cosine(double u, double s0 = -1.0, double s1 = 1.0) {
    return make(ProtocolKind::Cosine, u, s0, s1);
  }
  static PumpProtocol quadratic(double u, double s0 = -1.0, double s1 = 1.0) {
    return make(ProtocolKind::Quadratic, u, s0, s1);
  }

  double duration() const { return t_end - t_start; }

  double s(double t) const {
    const double half = 0.5 * (s_end - s_start);
    switch (kind) {
      case ProtocolKind::Linear:
        if (t <= t_start) return s_start;
        if (t >= t_end) return s_end;
        return rate * t;
      case ProtocolKind::Cosine:
        return 0.5 * (s_start + s_end) + half * std::cos(rate * t);
      case ProtocolKind::Quadratic:
        return s_end - half * rate * rate * t * t;
    }
    return 0.0;
  }

  double ds_dt(double t) const {
    const double half = 0.5 * (s_end - s_start);
    switch (kind) {
      case ProtocolKind::Linear: return rate;
      case ProtocolKind::Cosine: return -half * rate * std::sin(rate * t);
      case ProtocolKind::Quadratic: return -2.0 * half * rate * rate * t;
    }
    return 0.0;
  }

  double start_rate() const { return ds_dt(t_start); }
  double mean_rate() const { return (s_end - s_start) / duration(); }
};

/// -i[H, rho] + gamma (A rho A - {A^2, rho} / 2).
/// rho is not assumed Hermitian: RK4 stages carry roundoff-level
/// anti-Hermitian parts, and shortcuts like (H rho)^dagger = rho H let them grow.
template <int N>
Matrix<N> lindblad_rhs(const Matrix<N>& h, const Matrix<N>& a, const Matrix<N>& a2,
                       const Matrix<N>& rho, double gamma) {
  Matrix<N> out = (-I) * commutator(h, rho);
  if (gamma != 0.0) {
    Matrix<N> diss = a * rho * a;
    diss -= 0.5 * (a2 * rho + rho * a2);
    out += gamma * diss;
  }
  return out;
}

struct TrajectorySample {
  double t = 0.0;
  double s = 0.0;
};

template <int N>
struct StateSample : TrajectorySample {
  Matrix<N> rho;
};

/// Options for one fixed-step run.
struct EvolveOptions {
  int stride = 0;             // store every stride-th step; 0 picks ~2001 samples
  bool record = true;         // keep samples in the trajectory
  bool check_health = true;   // throw StepTooLarge on trace drift or lost positivity
  bool accumulate_current = false;  // integrate Tr[rho dH/dk] dt alongside rho
};

template <int N>
struct Trajectory {
  std::vector<StateSample<N>> samples;
  Matrix<N> final_state;
  double step = 0.0;
  int steps = 0;
  int stride = 1;
  double gamma = 0.0;
  double k = 0.0;
  // Health summary over every stored sample and the final state.
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
  double max_hermiticity_error = 0.0;
  double max_purity_increase = 0.0;  // largest Tr rho^2 increase between samples
  // Integral of Tr[rho(t) dH/dk(s(t))] over the protocol when requested.
  double current_integral = 0.0;
};

inline constexpr double kPurityTolerance = 1e-9;

/// Largest step satisfying step * max(||H||, gamma ||A||^2) <= factor along
/// the path (spectral norms sampled on 401 points).
template <PumpModel M>
double default_step(const M& model, double k, const PumpProtocol& protocol, double gamma,
                    double factor = 0.05) {
  double scale = 0.0;
  constexpr int samples = 401;
  for (int i = 0; i < samples; ++i) {
    const double t = protocol.t_start + protocol.duration() * i / (samples - 1);
    const double s = protocol.s(t);
    const auto h = model.hamiltonian(k, s);
    const auto a = dephasing_operator(model, h, k, s);
    const auto eh = hermitian_eigenvalues(h);
    const auto ea = hermitian_eigenvalues(a);
    const double hn = std::max(std::abs(eh.front()), std::abs(eh.back()));
    const double an = std::max(std::abs(ea.front()), std::abs(ea.back()));
    scale = std::max({scale, hn, gamma * an * an});
  }
  return scale > 0.0 ? factor / scale : protocol.duration() / 1000.0;
}

namespace detail {

template <int N>
struct StageOperators {
  Matrix<N> h, a, a2, vk;
};

template <PumpModel M>
StageOperators<M::dim> stage_operators(const M& model, double k, double s, bool with_current) {
  StageOperators<M::dim> op;
  op.h = model.hamiltonian(k, s);
  op.a = dephasing_operator(model, op.h, k, s);
  op.a2 = op.a * op.a;
  if (with_current) {
    if constexpr (requires { model.dh_dk(k, s); }) op.vk = model.dh_dk(k, s);
  }
  return op;
}

}  // namespace detail

/// Integrates d rho/dt = -i[H, rho] + gamma (A rho A - {A^2, rho}/2) in the
/// fixed lab basis with classical RK4 from protocol.t_start to t_end.
/// The step is shrunk so that an integer number of steps lands on t_end.
/// No trace renormalization is applied.
template <PumpModel M>
Trajectory<M::dim> evolve(const DensityMatrix<M::dim>& rho0, const M& model, double k,
                          const PumpProtocol& protocol, double gamma, double step,
                          const EvolveOptions& options = {}) {
  constexpr int N = M::dim;
  if (!(step > 0.0)) throw PumpError(ErrorKind::InvalidArgument, "step must be positive");
  if (gamma < 0.0) throw PumpError(ErrorKind::InvalidArgument, "gamma must be non-negative");
  if (rho0.basis() != Basis::Lab) {
    throw PumpError(ErrorKind::InvalidArgument, "evolve expects a lab-basis initial state");
  }
  if (options.accumulate_current && !model_has_k(model)) {
    throw PumpError(ErrorKind::InvalidArgument, "current needs a model with quasimomentum");
  }

  const double span = protocol.duration();
  const int n = std::max(1, static_cast<int>(std::ceil(span / step - 1e-9)));
  const double h = span / n;

  Trajectory<N> traj;
  traj.step = h;
  traj.steps = n;
  traj.gamma = gamma;
  traj.k = k;
  traj.stride = options.stride > 0
                    ? options.stride
                    : std::max(1, static_cast<int>(std::ceil(span / (2001.0 * h))));

  Matrix<N> rho = rho0.matrix();
  double last_purity = trace_product(rho, rho).real();
  auto observe = [&](int i, double t) {
    const StateHealth health = inspect_state(rho);
    traj.max_trace_drift = std::max(traj.max_trace_drift, health.trace_error);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, health.min_eigenvalue);
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, health.hermiticity_error);
    traj.max_purity_increase = std::max(traj.max_purity_increase, health.purity - last_purity);
    last_purity = health.purity;
    if (options.check_health &&
        (!(health.trace_error <= kTraceTolerance) || !(health.min_eigenvalue >= kPositivityTolerance))) {
      std::ostringstream os;
      os << "at t=" << t << " (step " << i << "/" << n << ", h=" << h
         << "): trace error " << health.trace_error << ", min eigenvalue " << health.min_eigenvalue
         << "; halve the step";
      throw PumpError(ErrorKind::StepTooLarge, os.str());
    }
    if (options.record) {
      StateSample<N> smp;
      smp.t = t;
      smp.s = protocol.s(t);
      smp.rho = rho;
      traj.samples.push_back(smp);
    }
  };

  const bool current = options.accumulate_current;
  auto ops_start = detail::stage_operators(model, k, protocol.s(protocol.t_start), current);
  observe(0, protocol.t_start);
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = protocol.t_start + i * h;
    const double t_next = (i + 1 == n) ? protocol.t_end : protocol.t_start + (i + 1) * h;
    const auto ops_mid = detail::stage_operators(model, k, protocol.s(t + 0.5 * h), current);
    const auto ops_end = detail::stage_operators(model, k, protocol.s(t_next), current);

    const Matrix<N> k1 = lindblad_rhs(ops_start.h, ops_start.a, ops_start.a2, rho, gamma);
    const Matrix<N> r2 = rho + (0.5 * h) * k1;
    const Matrix<N> k2 = lindblad_rhs(ops_mid.h, ops_mid.a, ops_mid.a2, r2, gamma);
    const Matrix<N> r3 = rho + (0.5 * h) * k2;
    const Matrix<N> k3 = lindblad_rhs(ops_mid.h, ops_mid.a, ops_mid.a2, r3, gamma);
    const Matrix<N> r4 = rho + h * k3;
    const Matrix<N> k4 = lindblad_rhs(ops_end.h, ops_end.a, ops_end.a2, r4, gamma);
    if (current) {
      q += h / 6.0 *
           (trace_product(rho, ops_start.vk).real() + 2.0 * trace_product(r2, ops_mid.vk).real() +
            2.0 * trace_product(r3, ops_mid.vk).real() + trace_product(r4, ops_end.vk).real());
    }
    Matrix<N> incr = k1 + k4;
    incr += 2.0 * (k2 + k3);
    rho += (h / 6.0) * incr;
    ops_start = ops_end;
    if ((i + 1) % traj.stride == 0 || i + 1 == n) observe(i + 1, t_next);
  }
  traj.final_state = rho;
  traj.current_integral = q;
  return traj;
}

struct ConvergenceReport {
  double trace_distance = 0.0;
  double step_coarse = 0.0;
  double step_fine = 0.0;
  bool pass = false;
  std::string note;
};

inline constexpr double kConvergenceTolerance = 1e-8;

/// Compares the final states of two runs that differ only in step size.
template <int N>
ConvergenceReport convergence_check(const Trajectory<N>& coarse, const Trajectory<N>& fine) {
  ConvergenceReport r;
  r.step_coarse = coarse.step;
  r.step_fine = fine.step;
  r.trace_distance = trace_distance(coarse.final_state, fine.final_state);
  r.pass = std::isfinite(r.trace_distance) && r.trace_distance <= kConvergenceTolerance;
  std::ostringstream os;
  os << "trace distance " << r.trace_distance << " between h=" << coarse.step << " and h=" << fine.step;
  r.note = os.str();
  return r;
}

/// Runs at `step` and `step / 2` and compares. A blow-up or loss of positivity
/// at the coarse step is reported as a failure, not thrown.
template <PumpModel M>
ConvergenceReport convergence_check(const DensityMatrix<M::dim>& rho0, const M& model, double k,
                                    const PumpProtocol& protocol, double gamma, double step) {
  EvolveOptions opt;
  opt.record = false;
  opt.check_health = true;
  try {
    const auto coarse = evolve(rho0, model, k, protocol, gamma, step, opt);
    opt.check_health = false;
    const auto fine = evolve(rho0, model, k, protocol, gamma, 0.5 * step, opt);
    return convergence_check(coarse, fine);
  } catch (const PumpError& e) {
    if (e.kind() != ErrorKind::StepTooLarge) throw;
    ConvergenceReport r;
    r.step_coarse = step;
    r.step_fine = 0.5 * step;
    r.trace_distance = INFINITY;
    r.pass = false;
    r.note = std::string("coarse run lost trace or positivity: ") + e.what();
    return r;
  }
}

/// Tr[rho v_k] / v_local: the instantaneous current density per unit sweep.
template <int N>
double current_trace(const Matrix<N>& rho, const Matrix<N>& v_k, double v_local) {
  if (v_local == 0.0) {
    throw PumpError(ErrorKind::ZeroSweepRate, "local sweep rate is zero; integrate in t instead");
  }
  const cplx tr = trace_product(rho, v_k);
  if (std::abs(tr.imag()) > 1e-10 * std::max(1.0, std::abs(tr.real()))) {
    throw PumpError(ErrorKind::InvalidState, "Tr[rho v_k] has an imaginary residue");
  }
  return tr.real() / v_local;
}

}  // namespace pumpdeck
