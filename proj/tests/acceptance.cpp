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

// Desk-scale acceptance run: v = 1e-3, 201 x 201 grids, calibrated Lindblad step.
// One line per criterion; exit status is non-zero if any criterion fails.

#include <cstdio>

#include "checks.hpp"
#include "runner.hpp"

using namespace pumpdeck;

namespace {

void line(const std::string& label, bool pass, const std::string& detail, double seconds) {
  std::printf("%-12s [%s] %s (%.1fs)\n", label.c_str(), pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

}  // namespace

int main() {
  checks::CheckOptions o;
  o.full = true;
  o.workers = cli::resolve_workers(std::nullopt, 0);

  bool all = true;
  auto report = [&](const checks::CheckResult& r) {
    line("criterion " + r.id, r.pass, r.detail, r.seconds);
    all = all && r.pass;
  };

  const auto step = checks::step_convergence(o);
  line("step check", step.pass, step.detail, step.seconds);
  all = all && step.pass;

  report(checks::quantized_limit(o));
  report(checks::dephasing_suppression(o));
  report(checks::trivial_dip(o));
  report(checks::theory_numerics(o));
  report(checks::lz_closed_form(o));
  report(checks::protocol_rule(o));
  report(checks::three_level(o));

  bool pass8 = true;
  double seconds8 = 0.0;
  std::string failed8;
  for (const auto& r : checks::property_suite(o)) {
    line("  part " + r.id, r.pass, r.detail, r.seconds);
    pass8 = pass8 && r.pass;
    seconds8 += r.seconds;
    if (!r.pass) failed8 += " " + r.id;
  }
  line("criterion 8", pass8, pass8 ? "all property checks hold" : "failed:" + failed8, seconds8);
  all = all && pass8;

  std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: some criteria FAIL");
  return all ? 0 : 1;
}
