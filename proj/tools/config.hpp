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

// Experiment configuration: TOML in, fully resolved JSON echo out.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "pumpdeck.hpp"

namespace pumpdeck::cli {

/// Config problem; `field` is the dotted path of the offending key.
class ConfigError : public PumpError {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : PumpError(ErrorKind::ConfigInvalid, field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { PumpSweep, TransitionSweep };

inline std::string to_string(ExperimentKind k) {
  return k == ExperimentKind::PumpSweep ? "pump_sweep" : "transition_sweep";
}

struct ModelConfig {
  std::string kind = "qwz";  // qwz | landau_zener | spin_one
  double delta = 1.0;
  double g0 = 1.0;
  std::vector<double> dephasing_levels;  // empty: A = H
  bool operator==(const ModelConfig&) const = default;
};

struct ProtocolConfig {
  std::string kind = "linear";  // linear | cosine | quadratic
  double rate = 1e-3;
  double s_start = 0.0;
  double s_end = 2.0 * std::numbers::pi;
  bool operator==(const ProtocolConfig&) const = default;

  PumpProtocol make() const {
    if (kind == "linear") return PumpProtocol::linear(rate, s_start, s_end);
    if (kind == "cosine") return PumpProtocol::cosine(rate, s_start, s_end);
    return PumpProtocol::quadratic(rate, s_start, s_end);
  }
};

struct InitialConfig {
  std::string label = "initial";
  std::string kind = "band_filled";  // band_filled | coherent
  std::vector<double> weights{1.0, 0.0};
  std::vector<int> windings;
  std::vector<double> phases;
  bool operator==(const InitialConfig&) const = default;

  InitialStateSpec make() const {
    if (kind == "band_filled") return InitialStateSpec::band_filled(weights);
    return InitialStateSpec::coherent(weights, windings, phases);
  }
};

struct IntegratorConfig {
  double step = 0.0;          // > 0: fixed step for every run
  double step_factor = 1.0;   // starting factor for calibration, or the factor itself
  bool calibrate = true;
  bool operator==(const IntegratorConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::PumpSweep;
  ModelConfig model;
  std::vector<ProtocolConfig> protocols{ProtocolConfig{}};
  std::vector<InitialConfig> initials{InitialConfig{}};
  std::vector<double> gammas;
  int n_k = 201;
  int n_s = 201;
  IntegratorConfig integrator;
  std::string output_dir = "out";
  bool numeric = true;
  bool timing = false;
  int workers = 0;  // 0: take PUMP_DECK_WORKERS or 1
  int observe_level = 1;
  std::string closed_form = "none";  // none | landau_zener | protocol_rule | three_level
  bool operator==(const ExperimentConfig&) const = default;

  int dim() const { return model.kind == "spin_one" ? 3 : 2; }
};

namespace detail {

template <class T>
T required(const toml::node_view<const toml::node>& node, const std::string& field) {
  if (!node) throw ConfigError(field, "missing");
  auto v = node.value<T>();
  if (!v) throw ConfigError(field, "wrong type");
  return *v;
}

template <class T>
T optional(const toml::node_view<const toml::node>& node, const std::string& field, T fallback) {
  if (!node) return fallback;
  auto v = node.value<T>();
  if (!v) throw ConfigError(field, "wrong type");
  return *v;
}

template <class T>
std::vector<T> array_of(const toml::node_view<const toml::node>& node, const std::string& field) {
  std::vector<T> out;
  if (!node) return out;
  const toml::array* arr = node.as_array();
  if (!arr) throw ConfigError(field, "expected an array");
  for (std::size_t i = 0; i < arr->size(); ++i) {
    auto v = (*arr)[i].value<T>();
    if (!v) throw ConfigError(field + "[" + std::to_string(i) + "]", "wrong type");
    out.push_back(*v);
  }
  return out;
}

inline ProtocolConfig parse_protocol(const toml::node_view<const toml::node>& t, const std::string& f,
                                     ExperimentKind kind) {
  ProtocolConfig p;
  if (kind == ExperimentKind::TransitionSweep) {
    p.s_start = -1.0;
    p.s_end = 1.0;
  }
  p.kind = optional<std::string>(t["kind"], f + ".kind", p.kind);
  p.rate = optional<double>(t["rate"], f + ".rate", p.rate);
  p.s_start = optional<double>(t["s_start"], f + ".s_start", p.s_start);
  p.s_end = optional<double>(t["s_end"], f + ".s_end", p.s_end);
  return p;
}

inline InitialConfig parse_initial(const toml::node_view<const toml::node>& t, const std::string& f) {
  InitialConfig s;
  s.label = optional<std::string>(t["label"], f + ".label", s.label);
  s.kind = optional<std::string>(t["kind"], f + ".kind", s.kind);
  s.weights = array_of<double>(t["weights"], f + ".weights");
  if (s.weights.empty()) throw ConfigError(f + ".weights", "missing");
  for (auto w : array_of<int64_t>(t["windings"], f + ".windings")) s.windings.push_back(static_cast<int>(w));
  s.phases = array_of<double>(t["phases"], f + ".phases");
  return s;
}

}  // namespace detail

/// Throws ConfigError naming the first offending field.
inline void validate(const ExperimentConfig& c) {
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("name", "must be a plain non-empty file stem");
  }
  if (c.model.kind != "qwz" && c.model.kind != "landau_zener" && c.model.kind != "spin_one") {
    throw ConfigError("model.kind", "expected qwz, landau_zener or spin_one");
  }
  if (!std::isfinite(c.model.delta)) throw ConfigError("model.delta", "must be finite");
  if (c.model.kind != "qwz" && !(c.model.g0 > 0.0)) throw ConfigError("model.g0", "must be > 0");
  if (!c.model.dephasing_levels.empty() && static_cast<int>(c.model.dephasing_levels.size()) != c.dim()) {
    throw ConfigError("model.dephasing_levels", "needs one value per level");
  }
  if (c.kind == ExperimentKind::PumpSweep && c.model.kind != "qwz") {
    throw ConfigError("model.kind", "pump sweeps need a model with quasimomentum (qwz)");
  }
  if (c.protocols.empty()) throw ConfigError("protocol", "at least one protocol is required");
  for (std::size_t i = 0; i < c.protocols.size(); ++i) {
    const auto& p = c.protocols[i];
    const std::string f = "protocol[" + std::to_string(i) + "]";
    if (p.kind != "linear" && p.kind != "cosine" && p.kind != "quadratic") {
      throw ConfigError(f + ".kind", "expected linear, cosine or quadratic");
    }
    if (!(p.rate > 0.0)) throw ConfigError(f + ".rate", "must be > 0");
    if (!(p.s_end > p.s_start)) throw ConfigError(f + ".s_end", "must exceed s_start");
  }
  if (c.initials.empty()) throw ConfigError("initial", "at least one initial state is required");
  if (c.kind == ExperimentKind::PumpSweep && (c.protocols.size() != 1 || c.initials.size() != 1)) {
    throw ConfigError("initial", "pump sweeps take exactly one protocol and one initial state");
  }
  for (std::size_t i = 0; i < c.initials.size(); ++i) {
    const auto& s = c.initials[i];
    const std::string f = "initial[" + std::to_string(i) + "]";
    if (s.kind != "band_filled" && s.kind != "coherent") {
      throw ConfigError(f + ".kind", "expected band_filled or coherent");
    }
    try {
      s.make().validate(c.dim());
    } catch (const PumpError& e) {
      throw ConfigError(f + ".weights", e.what());
    }
  }
  if (c.gammas.empty()) throw ConfigError("sweep.gamma", "must be non-empty");
  for (std::size_t i = 0; i < c.gammas.size(); ++i) {
    if (!(c.gammas[i] >= 0.0) || !std::isfinite(c.gammas[i])) {
      throw ConfigError("sweep.gamma", "values must be finite and >= 0");
    }
    if (i > 0 && !(c.gammas[i] > c.gammas[i - 1])) {
      throw ConfigError("sweep.gamma", "values must be strictly increasing");
    }
  }
  if (c.n_k < 3 || c.n_k % 2 == 0) throw ConfigError("grid.n_k", "must be odd and >= 3");
  if (c.n_s < 3 || c.n_s % 2 == 0) throw ConfigError("grid.n_s", "must be odd and >= 3");
  if (c.integrator.step < 0.0) throw ConfigError("integrator.step", "must be >= 0");
  if (!(c.integrator.step_factor > 0.0)) throw ConfigError("integrator.step_factor", "must be > 0");
  if (c.workers < 0) throw ConfigError("output.workers", "must be >= 0");
  if (c.observe_level < 0 || c.observe_level >= c.dim()) {
    throw ConfigError("observe_level", "must index a level of the model");
  }
  if (c.closed_form != "none" && c.closed_form != "landau_zener" && c.closed_form != "protocol_rule" &&
      c.closed_form != "three_level") {
    throw ConfigError("closed_form", "expected none, landau_zener, protocol_rule or three_level");
  }
  if (c.closed_form == "landau_zener" || c.closed_form == "protocol_rule") {
    if (c.model.kind != "landau_zener") throw ConfigError("closed_form", "needs model.kind = landau_zener");
  }
  if (c.closed_form == "three_level" && c.model.kind != "spin_one") {
    throw ConfigError("closed_form", "needs model.kind = spin_one");
  }
}

/// Parses TOML text; `source` only labels parse errors.
inline ExperimentConfig parse_toml(std::string_view text, const std::string& source = "config") {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("<syntax>", os.str());
  }
  using detail::optional;
  const auto r = toml::node_view<const toml::node>(root);
  ExperimentConfig c;
  c.name = optional<std::string>(r["name"], "name", c.name);
  const std::string kind = optional<std::string>(r["kind"], "kind", "pump_sweep");
  if (kind == "pump_sweep") {
    c.kind = ExperimentKind::PumpSweep;
  } else if (kind == "transition_sweep") {
    c.kind = ExperimentKind::TransitionSweep;
  } else {
    throw ConfigError("kind", "expected pump_sweep or transition_sweep");
  }

  const auto m = r["model"];
  if (!m) throw ConfigError("model", "missing");
  c.model.kind = optional<std::string>(m["kind"], "model.kind", c.model.kind);
  c.model.delta = optional<double>(m["delta"], "model.delta", c.model.delta);
  c.model.g0 = optional<double>(m["g0"], "model.g0", c.model.g0);
  c.model.dephasing_levels = detail::array_of<double>(m["dephasing_levels"], "model.dephasing_levels");

  c.protocols.clear();
  if (r["protocol"] && r["protocols"]) throw ConfigError("protocols", "give either protocol or protocols");
  if (const auto* arr = r["protocols"].as_array()) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      c.protocols.push_back(detail::parse_protocol(toml::node_view<const toml::node>((*arr)[i]),
                                                   "protocols[" + std::to_string(i) + "]", c.kind));
    }
  } else {
    c.protocols.push_back(detail::parse_protocol(r["protocol"], "protocol", c.kind));
  }

  c.initials.clear();
  if (r["initial"] && r["initials"]) throw ConfigError("initials", "give either initial or initials");
  if (const auto* arr = r["initials"].as_array()) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      c.initials.push_back(detail::parse_initial(toml::node_view<const toml::node>((*arr)[i]),
                                                 "initials[" + std::to_string(i) + "]"));
    }
  } else {
    if (!r["initial"]) throw ConfigError("initial", "missing");
    c.initials.push_back(detail::parse_initial(r["initial"], "initial"));
  }

  const auto sw = r["sweep"];
  if (!sw) throw ConfigError("sweep", "missing");
  if (sw["gamma"] && sw["gamma_log"]) throw ConfigError("sweep", "give either gamma or gamma_log");
  if (sw["gamma_log"]) {
    const auto g = sw["gamma_log"];
    const double a = detail::required<double>(g["start"], "sweep.gamma_log.start");
    const double b = detail::required<double>(g["stop"], "sweep.gamma_log.stop");
    const auto n = detail::required<int64_t>(g["count"], "sweep.gamma_log.count");
    if (!(a > 0.0) || !(b > a) || n < 2) throw ConfigError("sweep.gamma_log", "need 0 < start < stop, count >= 2");
    for (int64_t i = 0; i < n; ++i) {
      c.gammas.push_back(a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1)));
    }
  } else {
    c.gammas = detail::array_of<double>(sw["gamma"], "sweep.gamma");
  }

  c.n_k = static_cast<int>(optional<int64_t>(r["grid"]["n_k"], "grid.n_k", c.n_k));
  c.n_s = static_cast<int>(optional<int64_t>(r["grid"]["n_s"], "grid.n_s", c.n_s));
  c.integrator.step = optional<double>(r["integrator"]["step"], "integrator.step", c.integrator.step);
  c.integrator.step_factor =
      optional<double>(r["integrator"]["step_factor"], "integrator.step_factor", c.integrator.step_factor);
  c.integrator.calibrate = optional<bool>(r["integrator"]["calibrate"], "integrator.calibrate", c.integrator.calibrate);
  c.output_dir = optional<std::string>(r["output"]["dir"], "output.dir", c.output_dir);
  c.numeric = optional<bool>(r["output"]["numeric"], "output.numeric", c.numeric);
  c.timing = optional<bool>(r["output"]["timing"], "output.timing", c.timing);
  c.workers = static_cast<int>(optional<int64_t>(r["output"]["workers"], "output.workers", c.workers));
  c.observe_level = static_cast<int>(optional<int64_t>(r["observe_level"], "observe_level", c.observe_level));
  c.closed_form = optional<std::string>(r["closed_form"], "closed_form", c.closed_form);
  validate(c);
  return c;
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["kind"] = to_string(c.kind);
  j["model"] = {{"kind", c.model.kind},
                {"delta", c.model.delta},
                {"g0", c.model.g0},
                {"dephasing_levels", c.model.dephasing_levels}};
  j["protocols"] = nlohmann::ordered_json::array();
  for (const auto& p : c.protocols) {
    j["protocols"].push_back({{"kind", p.kind}, {"rate", p.rate}, {"s_start", p.s_start}, {"s_end", p.s_end}});
  }
  j["initials"] = nlohmann::ordered_json::array();
  for (const auto& s : c.initials) {
    j["initials"].push_back({{"label", s.label},
                             {"kind", s.kind},
                             {"weights", s.weights},
                             {"windings", s.windings},
                             {"phases", s.phases}});
  }
  j["sweep"] = {{"gamma", c.gammas}};
  j["grid"] = {{"n_k", c.n_k}, {"n_s", c.n_s}};
  j["integrator"] = {{"step", c.integrator.step},
                     {"step_factor", c.integrator.step_factor},
                     {"calibrate", c.integrator.calibrate}};
  j["output"] = {{"dir", c.output_dir}, {"numeric", c.numeric}, {"timing", c.timing}, {"workers", c.workers}};
  j["observe_level"] = c.observe_level;
  j["closed_form"] = c.closed_form;
  return j;
}

/// Inverse of to_json; also accepts a sidecar (reads its "config" member).
inline ExperimentConfig from_json(const nlohmann::json& in) {
  const nlohmann::json& j = in.contains("config") ? in.at("config") : in;
  ExperimentConfig c;
  try {
    c.name = j.at("name").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "pump_sweep" && kind != "transition_sweep") throw ConfigError("kind", "unknown kind");
    c.kind = kind == "pump_sweep" ? ExperimentKind::PumpSweep : ExperimentKind::TransitionSweep;
    const auto& m = j.at("model");
    c.model = {m.at("kind").get<std::string>(), m.at("delta").get<double>(), m.at("g0").get<double>(),
               m.at("dephasing_levels").get<std::vector<double>>()};
    c.protocols.clear();
    for (const auto& p : j.at("protocols")) {
      c.protocols.push_back({p.at("kind").get<std::string>(), p.at("rate").get<double>(),
                             p.at("s_start").get<double>(), p.at("s_end").get<double>()});
    }
    c.initials.clear();
    for (const auto& s : j.at("initials")) {
      c.initials.push_back({s.at("label").get<std::string>(), s.at("kind").get<std::string>(),
                            s.at("weights").get<std::vector<double>>(), s.at("windings").get<std::vector<int>>(),
                            s.at("phases").get<std::vector<double>>()});
    }
    c.gammas = j.at("sweep").at("gamma").get<std::vector<double>>();
    c.n_k = j.at("grid").at("n_k").get<int>();
    c.n_s = j.at("grid").at("n_s").get<int>();
    const auto& in_cfg = j.at("integrator");
    c.integrator = {in_cfg.at("step").get<double>(), in_cfg.at("step_factor").get<double>(),
                    in_cfg.at("calibrate").get<bool>()};
    const auto& out = j.at("output");
    c.output_dir = out.at("dir").get<std::string>();
    c.numeric = out.at("numeric").get<bool>();
    c.timing = out.at("timing").get<bool>();
    c.workers = out.at("workers").get<int>();
    c.observe_level = j.at("observe_level").get<int>();
    c.closed_form = j.at("closed_form").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("<json>", e.what());
  }
  validate(c);
  return c;
}

/// Loads .toml or .json (sidecar) files.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("<json>", e.what());
    }
    return from_json(j);
  }
  return parse_toml(buf.str(), path.string());
}

}  // namespace pumpdeck::cli
