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

#include <cmath>
#include <numbers>
#include <numeric>

#include "pumpdeck/errors.hpp"
#include "pumpdeck/quadrature.hpp"

using namespace pumpdeck;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Simpson is exact for cubics", "[quad]") {
  const auto cubic = [](double x) { return 2.0 * x * x * x - x * x + 3.0; };
  // int_{-1}^{2} = [x^4/2 - x^3/3 + 3x] = (8 - 8/3 + 6) - (1/2 + 1/3 - 3)
  const double exact = (8.0 - 8.0 / 3.0 + 6.0) - (0.5 + 1.0 / 3.0 - 3.0);
  CHECK_THAT(quad::simpson(cubic, -1.0, 2.0, 2), WithinAbs(exact, 1e-13));

  const auto w = quad::simpson_weights(9, 3.0);
  CHECK_THAT(std::accumulate(w.begin(), w.end(), 0.0), WithinAbs(3.0, 1e-15));
  double acc = 0.0;
  for (int i = 0; i < 9; ++i) acc += w[i] * cubic(-1.0 + 3.0 * i / 8.0);
  CHECK_THAT(acc, WithinAbs(exact, 1e-13));
}

TEST_CASE("Simpson converges at fourth order", "[quad]") {
  const auto f = [](double x) { return std::exp(std::sin(x)); };
  const double ref = quad::adaptive_simpson(f, 0.0, 1.0, 1e-14);
  const double e1 = std::abs(quad::simpson(f, 0.0, 1.0, 8) - ref);
  const double e2 = std::abs(quad::simpson(f, 0.0, 1.0, 16) - ref);
  CHECK_THAT(e1 / e2, WithinRel(16.0, 0.1));
}

TEST_CASE("adaptive Simpson hits its tolerance", "[quad]") {
  // int_0^pi sin = 2, int_0^1 sqrt(x) = 2/3 (endpoint singular derivative)
  CHECK_THAT(quad::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12),
             WithinAbs(2.0, 1e-11));
  CHECK_THAT(quad::adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12),
             WithinAbs(2.0 / 3.0, 1e-9));
}

TEST_CASE("periodic trapezoid is spectrally accurate", "[quad]") {
  // int_{-pi}^{pi} exp(cos k) dk = 2 pi I0(1)
  const double exact = 2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, 1.0);
  const auto ks = quad::symmetric_k_grid(21);
  std::vector<double> f;
  for (double k : ks) f.push_back(std::exp(std::cos(k)));
  CHECK_THAT(quad::periodic_trapezoid(f, 2.0 * std::numbers::pi), WithinAbs(exact, 1e-13));
}

TEST_CASE("symmetric k grid", "[quad]") {
  const auto k = quad::symmetric_k_grid(201);
  REQUIRE(k.size() == 201);
  CHECK(k[100] == 0.0);
  for (int i = 0; i < 100; ++i) CHECK(k[i] == -k[200 - i]);
  CHECK(k.front() > -std::numbers::pi);
  CHECK(k.back() < std::numbers::pi);
  CHECK_THAT(k[1] - k[0], WithinAbs(2.0 * std::numbers::pi / 201, 1e-15));
  CHECK_THROWS_AS(quad::symmetric_k_grid(200), PumpError);
  CHECK_THROWS_AS(quad::simpson_weights(4, 1.0), PumpError);
}

TEST_CASE("closed grid hits both endpoints", "[quad]") {
  const auto s = quad::closed_grid(0.0, 2.0 * std::numbers::pi, 201);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == 2.0 * std::numbers::pi);
}
