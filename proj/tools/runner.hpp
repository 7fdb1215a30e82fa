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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace pumpdeck::cli {

inline constexpr const char* kPumpHeader =
    "gamma,Q_a,Q_b,Q_c,Q_d,Q_theory,Q_numeric,abs_err,flags,wall_time_seconds";
inline constexpr const char* kTransitionHeader =
    "protocol,state,gamma,coherence_part,population_part,delta_p_theory,delta_p_closed_form,"
    "delta_p_numeric,abs_err,flags,wall_time_seconds";

/// Shortest text that reads back to the same double; empty for "no value".
inline std::string format_real(std::optional<double> x) {
  if (!x) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *x);
  return buf;
}

struct PumpRow {
  double gamma = 0.0;
  double q_a = 0.0, q_b = 0.0, q_c = 0.0, q_d = 0.0, q_theory = 0.0;
  std::optional<double> q_numeric;
  std::optional<double> abs_err;
  std::string flags = "none";
  double wall_time = 0.0;

  std::string csv() const {
    return format_real(gamma) + ',' + format_real(q_a) + ',' + format_real(q_b) + ',' + format_real(q_c) +
           ',' + format_real(q_d) + ',' + format_real(q_theory) + ',' + format_real(q_numeric) + ',' +
           format_real(abs_err) + ',' + flags + ',' + format_real(wall_time);
  }
};

struct TransitionRow {
  std::string protocol;
  std::string state;
  double gamma = 0.0;
  double coherence_part = 0.0, population_part = 0.0, theory = 0.0;
  std::optional<double> closed_form;
  std::optional<double> numeric;
  std::optional<double> abs_err;
  std::string flags = "none";
  double wall_time = 0.0;

  std::string csv() const {
    return protocol + ',' + state + ',' + format_real(gamma) + ',' + format_real(coherence_part) + ',' +
           format_real(population_part) + ',' + format_real(theory) + ',' + format_real(closed_form) + ',' +
           format_real(numeric) + ',' + format_real(abs_err) + ',' + flags + ',' + format_real(wall_time);
  }
};

struct RunOptions {
  std::optional<int> workers;
  bool theory_only = false;
  std::optional<std::string> out_dir;
  bool quiet = false;
};

struct RunResult {
  ExperimentConfig resolved;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  std::vector<PumpRow> pump_rows;
  std::vector<TransitionRow> transition_rows;
};

/// Worker count: explicit flag, then config, then PUMP_DECK_WORKERS, then 1.
inline int resolve_workers(std::optional<int> flag, int from_config) {
  if (flag) {
    if (*flag < 1) throw ConfigError("--workers", "must be >= 1");
    return *flag;
  }
  if (from_config > 0) return from_config;
  if (const char* env = std::getenv("PUMP_DECK_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError("PUMP_DECK_WORKERS", "must be a positive integer");
    return static_cast<int>(n);
  }
  return 1;
}

template <class F>
decltype(auto) with_model(const ModelConfig& m, F&& fn) {
  const Dephasing deph =
      m.dephasing_levels.empty() ? Dephasing::equals_h() : Dephasing::diagonal(m.dephasing_levels);
  if (m.kind == "qwz") return fn(QwzModel{m.delta, deph});
  if (m.kind == "landau_zener") return fn(LandauZenerModel{m.g0, deph});
  return fn(SpinOneModel{m.g0, deph});
}

inline std::vector<double> calibration_probes(bool has_k) {
  if (!has_k) return {0.0};
  return {0.0, std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0, std::numbers::pi};
}

/// Step factor for the Lindblad runs at one gamma, per the integrator settings.
template <PumpModel M>
double choose_step_factor(const M& model, const InitialStateSpec& init, double gamma, const PumpProtocol& proto,
                          const IntegratorConfig& integ) {
  if (!integ.calibrate) return integ.step_factor;
  return calibrate_step(model, init, gamma, proto, calibration_probes(model_has_k(model)), integ.step_factor)
      .step_factor;
}

namespace detail {

inline void log(const RunOptions& opt, const std::string& line) {
  if (!opt.quiet) std::cerr << line << '\n';
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <PumpModel M>
std::vector<PumpRow> pump_rows(const M& model, const ExperimentConfig& c, int workers, const RunOptions& opt) {
  std::vector<PumpRow> rows;
  const auto proto = c.protocols.front().make();
  const auto init = c.initials.front().make();
  const PumpGrid grid{c.n_k, c.n_s};
  for (double gamma : c.gammas) {
    const auto t0 = std::chrono::steady_clock::now();
    TheoryOptions topt;
    topt.workers = workers;
    const auto th = pumped_charge_theory(model, init, gamma, proto, grid, topt);
    PumpRow row;
    row.gamma = gamma;
    row.q_a = th.q_a;
    row.q_b = th.q_b;
    row.q_c = th.q_c;
    row.q_d = th.q_d;
    row.q_theory = th.q_theory;
    PumpFlags flags = th.flags;
    if (c.numeric) {
      NumericOptions nopt;
      nopt.workers = workers;
      nopt.step = c.integrator.step;
      if (nopt.step == 0.0) nopt.step_factor = choose_step_factor(model, init, gamma, proto, c.integrator);
      const auto num = pumped_charge_numeric(model, init, gamma, proto, grid, nopt);
      row.q_numeric = num.q;
      row.abs_err = std::abs(th.q_theory - num.q);
      flags.non_cancellation = non_cancellation(th, num.q);
    }
    row.flags = flags.to_string();
    const double secs = seconds_since(t0);
    row.wall_time = c.timing ? secs : 0.0;
    char buf[256];
    std::snprintf(buf, sizeof buf, "[%s] gamma=%g Q_theory=%.10g Q_numeric=%s (%.1fs)", c.name.c_str(), gamma,
                  th.q_theory, row.q_numeric ? format_real(row.q_numeric).c_str() : "-", secs);
    log(opt, buf);
    rows.push_back(row);
  }
  return rows;
}

/// Closed-form value of the configured family, when the run matches its premises.
inline std::optional<double> closed_form_value(const ExperimentConfig& c, const ProtocolConfig& p,
                                               const Matrix<3>* rho3, double gamma) {
  const bool unit_sweep = p.s_start == -1.0 && p.s_end == 1.0 && c.model.g0 == 1.0;
  if (c.closed_form == "landau_zener" && unit_sweep && p.kind == "linear") {
    return lz_transition_closed_form(p.rate, gamma);
  }
  if (c.closed_form == "protocol_rule" && unit_sweep) {
    const double v0 = p.make().start_rate();
    return -v0 * gamma / (4.0 * (gamma * gamma + 2.0));
  }
  if (c.closed_form == "three_level" && rho3 && p.kind == "linear" && p.s_start == -1.0 && p.s_end == 1.0) {
    // Closed form labels levels from the top: 1 = top, 2 = middle.
    const Matrix<3>& r = *rho3;
    return three_level_transition_closed_form(p.rate, gamma, c.model.g0, -1.0, 1.0, r(2, 2).real(),
                                              r(1, 1).real(), r(2, 1));
  }
  return std::nullopt;
}

template <PumpModel M>
std::vector<TransitionRow> transition_rows(const M& model, const ExperimentConfig& c, const RunOptions& opt) {
  constexpr int N = M::dim;
  std::vector<TransitionRow> rows;
  for (const auto& pc : c.protocols) {
    const auto proto = pc.make();
    for (const auto& ic : c.initials) {
      const auto init = ic.make();
      const Matrix<N> rho0 = init.template eigen_density<N>(0.0);
      const Matrix<3>* rho3 = nullptr;
      if constexpr (N == 3) rho3 = &rho0;
      for (double gamma : c.gammas) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = population_transfer(model, proto, rho0, gamma);
        TransitionRow row;
        row.protocol = pc.kind;
        row.state = ic.label;
        row.gamma = gamma;
        row.coherence_part = rep.coherence_part[c.observe_level];
        row.population_part = rep.population_part[c.observe_level];
        row.theory = rep.delta_p[c.observe_level];
        row.closed_form = closed_form_value(c, pc, rho3, gamma);
        if (c.numeric) {
          double step = c.integrator.step;
          if (step == 0.0) {
            step = default_step(model, 0.0, proto, gamma,
                                choose_step_factor(model, init, gamma, proto, c.integrator));
          }
          const auto dp = evolved_population_change(model, proto, rho0, gamma, step);
          row.numeric = dp[c.observe_level];
          row.abs_err = std::abs(row.theory - *row.numeric);
        }
        PumpFlags flags;
        flags.zero_dephasing = rep.zero_dephasing;
        row.flags = flags.to_string();
        const double secs = seconds_since(t0);
        row.wall_time = c.timing ? secs : 0.0;
        char buf[256];
        std::snprintf(buf, sizeof buf, "[%s] %s/%s gamma=%g theory=%.10g numeric=%s", c.name.c_str(),
                      pc.kind.c_str(), ic.label.c_str(), gamma, row.theory,
                      row.numeric ? format_real(row.numeric).c_str() : "-");
        log(opt, buf);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace detail

/// Config exactly as it will be executed (flags folded in), for the sidecar.
inline ExperimentConfig resolve(ExperimentConfig c, const RunOptions& opt) {
  if (opt.theory_only) c.numeric = false;
  if (opt.out_dir) c.output_dir = *opt.out_dir;
  return c;
}

inline std::string sidecar_text(const ExperimentConfig& resolved) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config"] = to_json(resolved);
  return j.dump(2) + "\n";
}

/// Runs every row of the experiment and writes <dir>/<name>.csv and
/// <dir>/<name>.json. Row order follows the config, never the scheduler.
inline RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opt = {}) {
  validate(config);
  RunResult res;
  res.resolved = resolve(config, opt);
  const ExperimentConfig& c = res.resolved;
  const int workers = resolve_workers(opt.workers, c.workers);

  with_model(c.model, [&](const auto& model) {
    model.validate();
    if (c.kind == ExperimentKind::PumpSweep) {
      if constexpr (std::remove_cvref_t<decltype(model)>::has_k) {
        res.pump_rows = detail::pump_rows(model, c, workers, opt);
      }
    } else {
      res.transition_rows = detail::transition_rows(model, c, opt);
    }
    return 0;
  });

  const std::filesystem::path dir(c.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw PumpError(ErrorKind::InvalidArgument, "cannot create output directory " + dir.string());
  res.csv_path = dir / (c.name + ".csv");
  res.json_path = dir / (c.name + ".json");

  std::ofstream csv(res.csv_path, std::ios::binary);
  if (!csv) throw PumpError(ErrorKind::InvalidArgument, "cannot write " + res.csv_path.string());
  if (c.kind == ExperimentKind::PumpSweep) {
    csv << kPumpHeader << '\n';
    for (const auto& r : res.pump_rows) csv << r.csv() << '\n';
  } else {
    csv << kTransitionHeader << '\n';
    for (const auto& r : res.transition_rows) csv << r.csv() << '\n';
  }
  std::ofstream js(res.json_path, std::ios::binary);
  if (!js) throw PumpError(ErrorKind::InvalidArgument, "cannot write " + res.json_path.string());
  js << sidecar_text(c);
  return res;
}

}  // namespace pumpdeck::cli
