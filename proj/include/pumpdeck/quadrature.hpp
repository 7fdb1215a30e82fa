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

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "pumpdeck/errors.hpp"

namespace pumpdeck::quad {

/// Composite Simpson weights for `n` equally spaced samples (n odd, n >= 3)
/// spanning an interval of length `length`.
inline std::vector<double> simpson_weights(int n, double length) {
  if (n < 3 || n % 2 == 0) {
    throw PumpError(ErrorKind::InvalidArgument, "Simpson rule needs an odd sample count >= 3");
  }
  const double h = length / (n - 1);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  for (auto& x : w) x *= h / 3.0;
  return w;
}

/// Composite Simpson with `panels` (even) panels on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels < 2 || panels % 2) {
    throw PumpError(ErrorKind::InvalidArgument, "Simpson rule needs an even panel count");
  }
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

namespace detail {
template <class F>
double adaptive_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson with Richardson correction to absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Odd-sized uniform grid on the circle [-pi, pi) that contains 0 and every
/// +-k pair exactly: k_i = 2 pi i / n, i = -(n-1)/2 .. (n-1)/2.
inline std::vector<double> symmetric_k_grid(int n) {
  if (n < 3 || n % 2 == 0) {
    throw PumpError(ErrorKind::InvalidArgument, "k grid size must be odd and >= 3");
  }
  std::vector<double> k(n);
  const int half = (n - 1) / 2;
  for (int i = -half; i <= half; ++i) k[i + half] = 2.0 * std::numbers::pi * i / n;
  return k;
}

/// Closed uniform grid on [a, b] with n points.
inline std::vector<double> closed_grid(double a, double b, int n) {
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = (i == n - 1) ? b : a + (b - a) * i / (n - 1);
  return s;
}

/// Periodic trapezoid over one full period: equal weights period / n.
inline double periodic_trapezoid(std::span<const double> samples, double period) {
  double acc = 0.0;
  for (double x : samples) acc += x;
  return acc * period / static_cast<double>(samples.size());
}

}  // namespace pumpdeck::quad
