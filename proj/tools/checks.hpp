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

// Reproduction checks shared by `pump-deck verify` and the acceptance binary.
// Each check returns a verdict plus a one-line detail; exceptions become
// failed entries.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pumpdeck.hpp"

namespace pumpdeck::checks {

struct CheckResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  bool full = false;                          // desk-scale grids everywhere
  std::optional<std::uint64_t> gauge_scramble;  // random eigenvector phases in theory paths
  std::optional<double> forced_step_factor;   // skips calibration; large values coarsen on purpose
  int workers = 1;
};

inline std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

inline const PumpProtocol& cycle() {
  static const PumpProtocol p = PumpProtocol::linear(1e-3, 0.0, 2.0 * std::numbers::pi);
  return p;
}

inline std::vector<double> log_gammas(int n = 20, double lo = 0.1, double hi = 10.0) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

inline const std::vector<double> kProbes{0.0, 1.0, 2.0, std::numbers::pi};

namespace detail {

inline PumpBreakdown theory(double delta, const InitialStateSpec& init, double gamma, const CheckOptions& o,
                            PumpGrid grid = {}) {
  TheoryOptions t;
  t.gauge_scramble = o.gauge_scramble;
  t.workers = o.workers;
  return pumped_charge_theory(QwzModel{delta, {}}, init, gamma, cycle(), grid, t);
}

/// Calibrated Lindblad step for a model/state/protocol unless a factor is forced.
template <PumpModel M>
double lindblad_step(const M& model, const InitialStateSpec& init, double gamma, const PumpProtocol& p,
                     const CheckOptions& o, double k = 0.0) {
  const std::vector<double> probes = model_has_k(model) ? kProbes : std::vector<double>{0.0};
  const double factor =
      o.forced_step_factor ? *o.forced_step_factor : calibrate_step(model, init, gamma, p, probes).step_factor;
  return default_step(model, k, p, gamma, factor);
}

inline CheckResult run(const std::string& id, const std::string& title,
                       const std::function<bool(std::string&)>& body) {
  CheckResult r{id, title, false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.pass = body(r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

inline InitialStateSpec lz_state() { return InitialStateSpec::coherent({0.75, 0.25}, {}, {0.0, std::numbers::pi}); }
inline InitialStateSpec equal_lz_state() {
  return InitialStateSpec::coherent({0.5, 0.5}, {}, {0.0, std::numbers::pi});
}

struct PresetState {
  const char* name;
  double delta;
  InitialStateSpec init;
};

inline std::vector<PresetState> preset_states() {
  return {{"fig1a", 1.0, InitialStateSpec::lower_band()},
          {"fig1b", 2.5, InitialStateSpec::lower_band()},
          {"fig2a", -0.5, InitialStateSpec::coherent({0.5, 0.5})},
          {"fig2b", -1.6, InitialStateSpec::coherent({0.6, 0.4}, {0, 1})}};
}

// 1. delta = 1, lower band, gamma = 1e-3: Q within [0.99, 1] and Chern number 1.
inline CheckResult quantized_limit(const CheckOptions& o) {
  return detail::run("1", "quantized limit", [&](std::string& d) {
    const auto b = detail::theory(1.0, InitialStateSpec::lower_band(), 1e-3, o);
    const int c = chern_number(QwzModel{1.0, {}});
    d = fmt("Q_theory=%.9f chern=%d", b.q_theory, c);
    return b.q_theory >= 0.99 && b.q_theory <= 1.0 && c == 1;
  });
}

// 2. Q(gamma) non-increasing over the sweep with Q(10) < 0.1.
inline CheckResult dephasing_suppression(const CheckOptions& o) {
  return detail::run("2", "dephasing suppression", [&](std::string& d) {
    const std::vector<double> gs{0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<double> q;
    for (double g : gs) q.push_back(detail::theory(1.0, InitialStateSpec::lower_band(), g, o).q_theory);
    bool mono = true;
    for (std::size_t i = 1; i < q.size(); ++i) mono = mono && q[i] <= q[i - 1];
    d = fmt("Q=[%.4f %.4f %.4f %.4f %.4f %.4f %.4f] monotone=%s", q[0], q[1], q[2], q[3], q[4], q[5], q[6],
            mono ? "yes" : "no");
    return mono && q.back() < 0.1;
  });
}

// 3. delta = 2.5: Q(0) = 0 and a sign-definite dip that recovers.
inline CheckResult trivial_dip(const CheckOptions& o) {
  return detail::run("3", "trivial-phase dip and recovery", [&](std::string& d) {
    const std::vector<double> gs{0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<double> q;
    for (double g : gs) q.push_back(detail::theory(2.5, InitialStateSpec::lower_band(), g, o).q_theory);
    std::size_t imin = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
      if (q[i] < q[imin]) imin = i;
    bool sign_definite = true;
    for (std::size_t i = 1; i < q.size(); ++i) sign_definite = sign_definite && q[i] < 0.0;
    d = fmt("Q(0)=%.2e min Q=%.5f at gamma=%g, Q(10)=%.5f", q.front(), q[imin], gs[imin], q.back());
    return std::abs(q.front()) <= 1e-6 && sign_definite && q[imin] < q.front() && q[imin] < q.back();
  });
}

// 4. |Q_theory - Q_numeric| <= 0.02 for the four QWZ preset states and gamma in {0.2, 1, 5}.
inline CheckResult theory_numerics(const CheckOptions& o) {
  return detail::run("4", "theory-numerics agreement", [&](std::string& d) {
    const std::vector<double> gs = o.full ? std::vector<double>{0.2, 1.0, 5.0} : std::vector<double>{1.0};
    const PumpGrid grid = o.full ? PumpGrid{} : PumpGrid{21, 101};
    double worst = 0.0;
    std::string where;
    for (const auto& st : preset_states()) {
      if (!o.full && std::string(st.name) != "fig2b" && std::string(st.name) != "fig1a") continue;
      const QwzModel model{st.delta, {}};
      for (double g : gs) {
        const auto th = detail::theory(st.delta, st.init, g, o, grid);
        NumericOptions n;
        n.workers = o.workers;
        n.step_factor = o.forced_step_factor ? *o.forced_step_factor
                                             : calibrate_step(model, st.init, g, cycle(), kProbes).step_factor;
        const auto num = pumped_charge_numeric(model, st.init, g, cycle(), grid, n);
        const double err = std::abs(th.q_theory - num.q);
        if (err >= worst) {
          worst = err;
          where = fmt("%s gamma=%g theory=%.6f numeric=%.6f", st.name, g, th.q_theory, num.q);
        }
      }
    }
    d = fmt("max |diff|=%.3e (%s)", worst, where.c_str());
    return worst <= 0.02;
  });
}

// 5. Landau-Zener closed form vs Lindblad over 20 gammas, tolerance 1e-5.
inline CheckResult lz_closed_form(const CheckOptions& o) {
  return detail::run("5", "Landau-Zener closed form", [&](std::string& d) {
    const LandauZenerModel model{1.0, {}};
    const auto p = PumpProtocol::linear(1e-3, -1.0, 1.0);
    const auto init = lz_state();
    const Matrix<2> rho0 = init.eigen_density<2>(0.0);
    double worst = 0.0, at = 0.0;
    for (double g : log_gammas(o.full ? 20 : 8)) {
      const double step = detail::lindblad_step(model, init, g, p, o);
      const double num = evolved_population_change(model, p, rho0, g, step)[1];
      const double err = std::abs(lz_transition_closed_form(1e-3, g) - num);
      if (err >= worst) worst = err, at = g;
    }
    d = fmt("max |closed form - Lindblad|=%.3e at gamma=%.3g", worst, at);
    return worst <= 1e-5;
  });
}

// 6. Switch-on rule: cosine start gives no coherence term; quadratic/linear = 2 sqrt 2.
inline CheckResult protocol_rule(const CheckOptions& o) {
  return detail::run("6", "protocol switch-on rule", [&](std::string& d) {
    const LandauZenerModel model{1.0, {}};
    const auto init = equal_lz_state();
    const Matrix<2> rho0 = init.eigen_density<2>(0.0);
    const double g = 1.0;
    auto dp = [&](const PumpProtocol& p) {
      return evolved_population_change(model, p, rho0, g, detail::lindblad_step(model, init, g, p, o))[1];
    };
    const double cosine = dp(PumpProtocol::cosine(1e-3));
    const double linear = dp(PumpProtocol::linear(1e-3, -1.0, 1.0));
    const double quadratic = dp(PumpProtocol::quadratic(1e-3));
    const double ratio = quadratic / linear;
    d = fmt("cosine=%.2e linear=%.4e quadratic=%.4e ratio=%.4f (2 sqrt 2=%.4f)", cosine, linear, quadratic, ratio,
            2.0 * std::numbers::sqrt2);
    return std::abs(cosine) <= 2e-6 && std::abs(ratio / (2.0 * std::numbers::sqrt2) - 1.0) <= 0.02;
  });
}

// 7. Spin-1 closed form vs Lindblad for the coherent and mixed states.
inline CheckResult three_level(const CheckOptions& o) {
  return detail::run("7", "three-level closed form", [&](std::string& d) {
    const SpinOneModel model{1.0, {}};
    const auto p = PumpProtocol::linear(1e-3, -1.0, 1.0);
    const std::vector<std::pair<const char*, InitialStateSpec>> states{
        {"superposition", InitialStateSpec::coherent({0.1, 0.1, 0.8})},
        {"mixed", InitialStateSpec::band_filled({0.1, 0.1, 0.8})}};
    double worst = 0.0;
    std::string where;
    for (const auto& [name, init] : states) {
      const Matrix<3> rho0 = init.eigen_density<3>(0.0);
      for (double g : log_gammas(o.full ? 20 : 6)) {
        const double step = detail::lindblad_step(model, init, g, p, o);
        const double num = evolved_population_change(model, p, rho0, g, step)[2];
        const double cf = three_level_transition_closed_form(1e-3, g, 1.0, -1.0, 1.0, rho0(2, 2).real(),
                                                             rho0(1, 1).real(), rho0(2, 1));
        const double err = std::abs(cf - num);
        if (err >= worst) worst = err, where = fmt("%s gamma=%.3g", name, g);
      }
    }
    const Matrix<3> rho0 = states[0].second.eigen_density<3>(0.0);
    const double printed =
        three_level_transition_printed(1e-3, 1.0, 1.0, -1.0, rho0(2, 2).real(), rho0(1, 1).real(), rho0(2, 1));
    d = fmt("max |closed form - Lindblad|=%.3e (%s); levels counted from the top; literal printed form at "
            "gamma=1 evaluates to %g",
            worst, where.c_str(), printed);
    return worst <= 1e-5;
  });
}

// 8a. Invariants along 100 randomized Lindblad runs.
inline CheckResult random_evolution_invariants(const CheckOptions& o) {
  return detail::run("8a", "state invariants on 100 random runs", [&](std::string& d) {
    std::mt19937_64 rng(20261017);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_state = [&](int n) {
      Matrix<3> m;
      const int terms = 1 + static_cast<int>(u(rng) * n);
      double total = 0.0;
      for (int t = 0; t < terms; ++t) {
        Vector<3> v;
        for (int i = 0; i < n; ++i) v[i] = cplx(u(rng) - 0.5, u(rng) - 0.5);
        v = (1.0 / v.norm()) * v;
        const double w = u(rng) + 0.05;
        m += w * Matrix<3>::outer(v, v);
        total += w;
      }
      return Matrix<3>((1.0 / total) * m);
    };
    double drift = 0.0, herm = 0.0, min_eig = 1.0, purity_up = -1.0;
    auto absorb = [&](const auto& tr) {
      drift = std::max(drift, tr.max_trace_drift);
      herm = std::max(herm, tr.max_hermiticity_error);
      min_eig = std::min(min_eig, tr.min_eigenvalue);
      purity_up = std::max(purity_up, tr.max_purity_increase);
    };
    EvolveOptions eo;
    eo.check_health = false;
    eo.stride = 1;
    eo.record = false;
    const double factor = o.forced_step_factor.value_or(0.05);
    for (int run = 0; run < 50; ++run) {
      double delta = 0.0;
      do delta = -3.0 + 6.0 * u(rng);
      while (std::abs(std::abs(delta) - 2.0) < 0.2 || std::abs(delta) < 0.2);
      const QwzModel model{delta, {}};
      const double k = -std::numbers::pi + 2.0 * std::numbers::pi * u(rng);
      const double gamma = 5.0 * u(rng);
      const auto p = PumpProtocol::linear(0.05 + 0.45 * u(rng), 0.0, 2.0 * std::numbers::pi);
      const Matrix<3> r3 = random_state(2);
      Matrix<2> r;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = r3(i, j);
      absorb(evolve(DensityMatrix<2>(r), model, k, p, gamma, default_step(model, k, p, gamma, factor), eo));
    }
    for (int run = 0; run < 50; ++run) {
      const SpinOneModel model{0.5 + 1.5 * u(rng), {}};
      const double gamma = 5.0 * u(rng);
      const auto p = PumpProtocol::linear(0.01 + 0.09 * u(rng), -1.0, 1.0);
      absorb(evolve(DensityMatrix<3>(random_state(3)), model, 0.0, p, gamma,
                    default_step(model, 0.0, p, gamma, factor), eo));
    }
    d = fmt("max trace drift=%.2e max hermiticity=%.2e min eigenvalue=%.2e max purity increase=%.2e", drift, herm,
            min_eig, purity_up);
    return drift <= kTraceTolerance && herm <= kStateHermitianTolerance && min_eig >= kPositivityTolerance &&
           purity_up <= kPurityTolerance;
  });
}

// 8b. Random eigenvector phases leave Q_theory unchanged.
inline CheckResult gauge_invariance(const CheckOptions& o) {
  return detail::run("8b", "gauge invariance of Q_theory", [&](std::string& d) {
    double worst = 0.0;
    const PumpGrid grid{41, 41};
    for (const auto& st : preset_states()) {
      for (double g : {0.2, 1.0}) {
        CheckOptions plain = o;
        plain.gauge_scramble.reset();
        const double q0 = detail::theory(st.delta, st.init, g, plain, grid).q_theory;
        for (std::uint64_t seed : {1ull, 99ull, 12345ull}) {
          CheckOptions scr = o;
          scr.gauge_scramble = seed;
          worst = std::max(worst, std::abs(detail::theory(st.delta, st.init, g, scr, grid).q_theory - q0));
        }
      }
    }
    d = fmt("max |Q(scrambled) - Q|=%.2e", worst);
    return worst <= 1e-10;
  });
}

// 8c. General subterms equal the two-band metric/curvature forms.
inline CheckResult two_band_equivalence(const CheckOptions&) {
  return detail::run("8c", "general vs two-band subterms", [&](std::string& d) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double delta = 0.0;
      do delta = -3.0 + 6.0 * u(rng);
      while (std::abs(std::abs(delta) - 2.0) < 0.1 || std::abs(delta) < 0.1);
      const QwzModel model{delta, {}};
      const double k = -std::numbers::pi + 2.0 * std::numbers::pi * u(rng);
      const double s = 2.0 * std::numbers::pi * u(rng);
      const double gamma = 10.0 * u(rng);
      const double p1 = u(rng);
      const std::array<double, 2> pops{p1, 1.0 - p1};
      const auto geo = quantum_metric_and_curvature(k, s, model);
      const auto e = hermitian_eigenvalues(model.hamiltonian(k, s));
      const double big_gamma = gamma * (e[1] - e[0]) / 2.0;
      const double drho = pops[0] - pops[1];
      const double fa = drho * big_gamma * geo.g_ks / (big_gamma * big_gamma + 1.0);
      const double fb = drho * geo.omega_ks / (big_gamma * big_gamma + 1.0);
      const auto g = point_geometry(model, k, s, gamma);
      const double scale = std::max(1.0, std::abs(geo.g_ks) + std::abs(geo.omega_ks));
      worst = std::max(worst, std::abs(subterm_a(g, pops) - fa) / scale);
      worst = std::max(worst, std::abs(subterm_b(g, pops) - fb) / scale);
    }
    d = fmt("max deviation=%.2e over 1000 points", worst);
    return worst <= 1e-10;
  });
}

// 8d. Two-band identity G_kk G_ss - G_ks^2 = Omega_ks^2.
inline CheckResult metric_identity(const CheckOptions&) {
  return detail::run("8d", "metric-curvature identity", [&](std::string& d) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double delta = 0.0;
      do delta = -3.0 + 6.0 * u(rng);
      while (std::abs(std::abs(delta) - 2.0) < 0.1 || std::abs(delta) < 0.1);
      const double k = -std::numbers::pi + 2.0 * std::numbers::pi * u(rng);
      const double s = 2.0 * std::numbers::pi * u(rng);
      const auto g = quantum_metric_and_curvature(k, s, QwzModel{delta, {}});
      const double lhs = g.g_kk * g.g_ss - g.g_ks * g.g_ks;
      worst = std::max(worst, std::abs(lhs - g.omega_ks * g.omega_ks) / std::max(1.0, std::abs(lhs)));
    }
    d = fmt("max deviation=%.2e over 1000 points", worst);
    return worst <= 1e-8;
  });
}

// 8e. Curvature integral is an integer and matches the plaquette Chern number.
inline CheckResult chern_quantization(const CheckOptions&) {
  return detail::run("8e", "Chern quantization", [&](std::string& d) {
    bool ok = true;
    for (double delta : {-1.6, -1.0, -0.5, 0.5, 1.0, 1.6, 2.5}) {
      const QwzModel model{delta, {}};
      const double integral = curvature_integral(model, PumpGrid{});
      const int c = chern_number(model);
      ok = ok && std::abs(integral - std::round(integral)) <= 1e-6 && static_cast<int>(std::round(integral)) == c;
      d += fmt("%s%g:%d", d.empty() ? "delta:C " : " ", delta, c);
    }
    return ok;
  });
}

// Negative control target: h vs h/2 at the step the suite actually uses.
inline CheckResult step_convergence(const CheckOptions& o) {
  return detail::run("step", "Lindblad step convergence", [&](std::string& d) {
    const QwzModel model{1.0, {}};
    const auto init = InitialStateSpec::lower_band();
    const double k = 0.5, g = 1.0;
    const double h = detail::lindblad_step(model, init, g, cycle(), o, k);
    const auto rep = convergence_check(initial_lab_state(model, init, k, 0.0), model, k, cycle(), g, h);
    d = (rep.pass ? "converged: " : "NOT converged: ") + rep.note;
    return rep.pass;
  });
}

inline std::vector<CheckResult> property_suite(const CheckOptions& o) {
  return {random_evolution_invariants(o), gauge_invariance(o), two_band_equivalence(o), metric_identity(o),
          chern_quantization(o)};
}

}  // namespace pumpdeck::checks
