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

// pump-deck: run pumping / transition sweeps from TOML, reproduce the shipped
// figure presets, and run the verification suite.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime/model error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "checks.hpp"
#include "config.hpp"
#include "pumpdeck_presets.hpp"
#include "runner.hpp"

namespace {

using namespace pumpdeck;

int report_run(const cli::RunResult& r) {
  std::cout << "wrote " << r.csv_path.string() << " and " << r.json_path.string() << '\n';
  return 0;
}

int verify(bool full, std::optional<std::uint64_t> scramble, std::optional<double> coarse, int workers) {
  checks::CheckOptions o;
  o.full = full;
  o.gauge_scramble = scramble;
  o.forced_step_factor = coarse;
  o.workers = workers;

  std::vector<checks::CheckResult> results;
  auto add = [&](checks::CheckResult r) {
    std::printf("%-5s %-34s %-4s %7.1fs  %s\n", r.id.c_str(), r.title.c_str(), r.pass ? "PASS" : "FAIL",
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
    results.push_back(std::move(r));
  };
  std::printf("%-5s %-34s %-4s %8s  %s\n", "id", "check", "", "time", "detail");
  add(checks::step_convergence(o));
  add(checks::quantized_limit(o));
  add(checks::dephasing_suppression(o));
  add(checks::trivial_dip(o));
  add(checks::theory_numerics(o));
  add(checks::lz_closed_form(o));
  add(checks::protocol_rule(o));
  add(checks::three_level(o));
  add(checks::random_evolution_invariants(o));
  add(checks::gauge_invariance(o));
  add(checks::two_band_equivalence(o));
  add(checks::metric_identity(o));
  add(checks::chern_quantization(o));

  int passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::printf("%d/%zu checks passed (%s%s%s)\n", passed, results.size(), full ? "full" : "fast",
              scramble ? ", gauge scrambled" : "", coarse ? ", forced coarse step" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic pumping under pure dephasing: theory vs Lindblad numerics"};
  app.set_version_flag("--version", std::string(pumpdeck::kVersion));
  app.require_subcommand(1);

  std::optional<int> workers;
  bool theory_only = false;
  std::optional<std::string> out_dir;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run the experiment described by a TOML (or sidecar JSON) config");
  std::string config_path;
  run->add_option("config", config_path, "Config file (.toml or .json sidecar)")->required();
  run->add_option("--workers", workers, "Worker threads (default: PUMP_DECK_WORKERS or 1)");
  run->add_flag("--theory-only", theory_only, "Skip the Lindblad numerics");
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_flag("--quiet", quiet, "No progress lines on stderr");

  auto* fig = app.add_subcommand("figure", "Run a shipped figure preset");
  std::string figure;
  fig->add_option("name", figure, "Preset name")
      ->required()
      ->check(CLI::IsMember({"fig1a", "fig1b", "fig2a", "fig2b", "figB1", "figB2", "figB3"}));
  fig->add_option("--workers", workers, "Worker threads (default: PUMP_DECK_WORKERS or 1)");
  fig->add_flag("--theory-only", theory_only, "Skip the Lindblad numerics");
  fig->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  fig->add_flag("--quiet", quiet, "No progress lines on stderr");
  bool print_preset = false;
  fig->add_flag("--print", print_preset, "Print the preset TOML instead of running it");

  auto* ver = app.add_subcommand("verify", "Run the verification checks and print a pass/fail table");
  bool fast = false, full = false;
  std::optional<std::uint64_t> scramble;
  std::optional<double> coarse;
  ver->add_flag("--fast", fast, "Reduced grids (default)");
  ver->add_flag("--full", full, "Desk-scale grids everywhere");
  ver->add_option("--gauge-scramble", scramble, "Inject random eigenvector phases (seed) into theory paths")
      ->expected(0, 1)
      ->default_str("1");
  ver->add_option("--coarse-step", coarse, "Debug: force this Lindblad step factor instead of calibrating")
      ->expected(0, 1)
      ->default_str("4");
  ver->add_option("--workers", workers, "Worker threads (default: PUMP_DECK_WORKERS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cli::RunOptions opt;
    opt.workers = workers;
    opt.theory_only = theory_only;
    opt.out_dir = out_dir;
    opt.quiet = quiet;
    if (run->parsed()) {
      return report_run(cli::run_experiment(cli::load_config(config_path), opt));
    }
    if (fig->parsed()) {
      const std::string text = pumpdeck::presets::text(figure);
      if (print_preset) {
        std::cout << text;
        return 0;
      }
      return report_run(cli::run_experiment(cli::parse_toml(text, figure + ".toml"), opt));
    }
    if (ver->parsed()) {
      if (fast && full) throw cli::ConfigError("verify", "--fast and --full are exclusive");
      if (ver->count("--gauge-scramble") && !scramble) scramble = 1;
      if (ver->count("--coarse-step") && !coarse) coarse = 4.0;
      return verify(full, scramble, coarse, cli::resolve_workers(workers, 0));
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const pumpdeck::PumpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
