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

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pumpdeck/eigen.hpp"
#include "pumpdeck/errors.hpp"
#include "pumpdeck/matrix.hpp"

namespace pumpdeck {

enum class ModelKind { QWZ, LandauZener, SpinOne, Custom };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::QWZ: return "qwz";
    case ModelKind::LandauZener: return "landau_zener";
    case ModelKind::SpinOne: return "spin_one";
    case ModelKind::Custom: return "custom";
  }
  return "unknown";
}

/// Lindblad operator choice. Pure dephasing only needs the eigenvalues A_m(s)
/// of an operator diagonal in the instantaneous eigenbasis of H(s).
struct Dephasing {
  enum class Kind { EqualsH, DiagonalInEigenbasis };
  Kind kind = Kind::EqualsH;
  std::vector<double> levels;  // A_m for DiagonalInEigenbasis, ascending-energy order

  static Dephasing equals_h() { return {}; }
  static Dephasing diagonal(std::vector<double> values) {
    return {Kind::DiagonalInEigenbasis, std::move(values)};
  }

  /// A_m(s) for level m.
  template <int N>
  double level(const EigenFrame<N>& frame, int m) const {
    return kind == Kind::EqualsH ? frame.energies[m] : levels.at(m);
  }

  template <int N>
  Matrix<N> build(const Matrix<N>& h) const {
    if (kind == Kind::EqualsH) return h;
    return build(eigendecompose(h));
  }
  template <int N>
  Matrix<N> build(const EigenFrame<N>& frame) const {
    if (kind == Kind::EqualsH) return frame.unproject(Matrix<N>::diagonal(frame.energies));
    if (static_cast<int>(levels.size()) != N) {
      throw PumpError(ErrorKind::InvalidArgument, "dephasing level count must equal model dimension");
    }
    std::array<double, N> d{};
    for (int m = 0; m < N; ++m) d[m] = levels[m];
    return frame.unproject(Matrix<N>::diagonal(d));
  }
};

/// User-facing description of a model family; the CLI and presets carry this.
struct ModelSpec {
  ModelKind kind = ModelKind::QWZ;
  double delta = 1.0;  // QWZ energy bias
  double g0 = 1.0;     // LZ / spin-1 minimum gap parameter
  Dephasing dephasing;
};

/// H, A and the parameter gradients at one (k, s) point. `dh_dk` is empty for
/// models without a quasimomentum.
template <int N>
struct OperatorBundle {
  Matrix<N> h;
  Matrix<N> a;
  Matrix<N> dh_ds;
  std::optional<Matrix<N>> dh_dk;
};

namespace detail {
inline std::string coordinate_label(double x) {
  constexpr double pi = std::numbers::pi;
  if (std::abs(x - pi) < 1e-12) return "π";
  if (std::abs(x + pi) < 1e-12) return "-π";
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline std::string point_label(double k, double s) {
  return "(k=" + coordinate_label(k) + ", s=" + coordinate_label(s) + ")";
}
}  // namespace detail

/// Qi-Wu-Zhang Chern insulator on the (k, s) torus.
struct QwzModel {
  static constexpr int dim = 2;
  static constexpr bool has_k = true;
  double delta = 1.0;
  Dephasing dephasing;

  Matrix<2> hamiltonian(double k, double s) const {
    return std::sin(k) * pauli::x() + std::sin(s) * pauli::y() +
           (delta + std::cos(k) + std::cos(s)) * pauli::z();
  }
  Matrix<2> dh_dk(double k, double /*s*/) const {
    return std::cos(k) * pauli::x() - std::sin(k) * pauli::z();
  }
  Matrix<2> dh_ds(double /*k*/, double s) const {
    return std::cos(s) * pauli::y() - std::sin(s) * pauli::z();
  }
  /// Half of the gap: |d(k, s)| for H = d . sigma.
  double half_gap(double k, double s) const {
    const double dz = delta + std::cos(k) + std::cos(s);
    return std::sqrt(std::sin(k) * std::sin(k) + std::sin(s) * std::sin(s) + dz * dz);
  }

  /// Throws DegenerateSpectrum naming the first high-symmetry point where the
  /// gap closes. The gap can only close at k, s in {0, pi}.
  void validate() const {
    constexpr double pi = std::numbers::pi;
    for (double k : {0.0, pi})
      for (double s : {0.0, pi})
        if (!(2.0 * half_gap(k, s) > kGapThreshold)) {
          std::ostringstream os;
          os << "QWZ gap closes at " << detail::point_label(k, s) << " for delta=" << delta;
          throw PumpError(ErrorKind::DegenerateSpectrum, os.str());
        }
  }

  OperatorBundle<2> bundle(double k, double s) const {
    OperatorBundle<2> b;
    b.h = hamiltonian(k, s);
    if (!(2.0 * half_gap(k, s) > kGapThreshold)) {
      std::ostringstream os;
      os << "QWZ gap closes at " << detail::point_label(k, s) << " for delta=" << delta;
      throw PumpError(ErrorKind::DegenerateSpectrum, os.str());
    }
    b.a = dephasing.build(b.h);
    b.dh_ds = dh_ds(k, s);
    b.dh_dk = dh_dk(k, s);
    return b;
  }
};

/// H(s) = (g0 sigma_x + s sigma_z) / 2.
struct LandauZenerModel {
  static constexpr int dim = 2;
  static constexpr bool has_k = false;
  double g0 = 1.0;
  Dephasing dephasing;

  Matrix<2> hamiltonian(double /*k*/, double s) const {
    return 0.5 * (g0 * pauli::x() + s * pauli::z());
  }
  Matrix<2> dh_ds(double /*k*/, double /*s*/) const { return 0.5 * pauli::z(); }
  void validate() const {
    if (!(g0 > 0.0)) throw PumpError(ErrorKind::InvalidArgument, "Landau-Zener g0 must be positive");
  }
  OperatorBundle<2> bundle(double k, double s) const {
    OperatorBundle<2> b;
    b.h = hamiltonian(k, s);
    b.a = dephasing.build(b.h);
    b.dh_ds = dh_ds(k, s);
    return b;
  }
};

/// H(s) = g0 S_x + s S_z with spin-1 matrices, S_z = diag(1, 0, -1).
struct SpinOneModel {
  static constexpr int dim = 3;
  static constexpr bool has_k = false;
  double g0 = 1.0;
  Dephasing dephasing;

  Matrix<3> hamiltonian(double /*k*/, double s) const { return g0 * spin1::x() + s * spin1::z(); }
  Matrix<3> dh_ds(double /*k*/, double /*s*/) const { return spin1::z(); }
  void validate() const {
    if (!(g0 > 0.0)) throw PumpError(ErrorKind::InvalidArgument, "spin-1 g0 must be positive");
  }
  OperatorBundle<3> bundle(double k, double s) const {
    OperatorBundle<3> b;
    b.h = hamiltonian(k, s);
    b.a = dephasing.build(b.h);
    b.dh_ds = dh_ds(k, s);
    return b;
  }
};

/// User-supplied matrix-valued functions. Commutation [H, A] = 0 is checked
/// pointwise by `check_commutation`, not symbolically.
template <int N>
struct CustomModel {
  static constexpr int dim = N;
  using Fn = std::function<Matrix<N>(double k, double s)>;
  bool has_k = false;
  Fn h;
  Fn dhds;
  Fn dhdk;  // may be empty when has_k is false
  Fn a;     // empty means A = H

  Matrix<N> hamiltonian(double k, double s) const { return h(k, s); }
  Matrix<N> dh_ds(double k, double s) const { return dhds(k, s); }
  Matrix<N> dh_dk(double k, double s) const { return dhdk(k, s); }
  void validate() const {
    if (!h || !dhds) throw PumpError(ErrorKind::InvalidArgument, "custom model needs H and dH/ds");
    if (has_k && !dhdk) throw PumpError(ErrorKind::InvalidArgument, "custom model needs dH/dk");
  }
  OperatorBundle<N> bundle(double k, double s) const {
    OperatorBundle<N> b;
    b.h = h(k, s);
    b.a = a ? a(k, s) : b.h;
    b.dh_ds = dhds(k, s);
    if (has_k) b.dh_dk = dhdk(k, s);
    return b;
  }
};

template <class M>
concept PumpModel = requires(const M& m, double k, double s) {
  { M::dim } -> std::convertible_to<int>;
  m.hamiltonian(k, s);
  m.dh_ds(k, s);
  m.bundle(k, s);
  m.validate();
};

template <class M>
constexpr bool model_has_k(const M& m) {
  if constexpr (requires { typename std::bool_constant<M::has_k>; }) {
    return M::has_k;
  } else {
    return m.has_k;
  }
}

/// Dephasing operator attached to a model at (k, s); custom models carry their
/// own callable, every other model a Dephasing choice.
template <PumpModel M>
Matrix<M::dim> dephasing_operator(const M& model, const Matrix<M::dim>& h, double k, double s) {
  if constexpr (requires { model.dephasing; }) {
    return model.dephasing.build(h);
  } else {
    return model.a ? model.a(k, s) : h;
  }
}

/// Eigenvalue A_m(s) of the dephasing operator for level m.
template <PumpModel M>
double dephasing_level(const M& model, const EigenFrame<M::dim>& frame, double k, double s, int m) {
  if constexpr (requires { model.dephasing; }) {
    return model.dephasing.level(frame, m);
  } else {
    if (!model.a) return frame.energies[m];
    return model.a(k, s).sandwich(frame.state(m), frame.state(m)).real();
  }
}

/// True when [H, A] vanishes within `tol` at every sampled point.
template <PumpModel M>
bool check_commutation(const M& model, const std::vector<double>& ks, const std::vector<double>& ss,
                       double tol = 1e-10) {
  for (double k : ks)
    for (double s : ss) {
      const auto b = model.bundle(k, s);
      if (commutator(b.h, b.a).max_abs() > tol) return false;
    }
  return true;
}

// Free-function forms of the three shipped bundles.

inline OperatorBundle<2> qwz_bundle(double k, double s, double delta,
                                    const Dephasing& deph = Dephasing::equals_h()) {
  return QwzModel{delta, deph}.bundle(k, s);
}

inline OperatorBundle<2> lz_bundle(double s, double g0) {
  LandauZenerModel{g0, {}}.validate();
  return LandauZenerModel{g0, {}}.bundle(0.0, s);
}

inline OperatorBundle<3> spin1_bundle(double s, double g0) {
  SpinOneModel{g0, {}}.validate();
  return SpinOneModel{g0, {}}.bundle(0.0, s);
}

struct SymmetryDiagnostic {
  bool spectrum_even = true;
  bool populations_even = true;
  double max_spectrum_mismatch = 0.0;
  double max_population_mismatch = 0.0;
  bool ok() const { return spectrum_even && populations_even; }
};

/// Checks that spectra E_j(+-k, s) agree within 1e-10 and that the initial
/// band populations agree within 1e-12 at every +-k pair of `k_grid`.
/// `populations(k)` returns the initial per-band populations at k.
template <PumpModel M, class PopulationFn>
SymmetryDiagnostic validate_k_symmetry(const M& model, PopulationFn&& populations,
                                       const std::vector<double>& k_grid,
                                       const std::vector<double>& s_samples) {
  constexpr int N = M::dim;
  SymmetryDiagnostic d;
  for (double k : k_grid) {
    if (k < 0.0) continue;
    for (double s : s_samples) {
      const auto ep = eigendecompose(model.hamiltonian(k, s));
      const auto em = eigendecompose(model.hamiltonian(-k, s));
      for (int j = 0; j < N; ++j)
        d.max_spectrum_mismatch =
            std::max(d.max_spectrum_mismatch, std::abs(ep.energies[j] - em.energies[j]));
    }
    const std::array<double, N> pp = populations(k);
    const std::array<double, N> pm = populations(-k);
    for (int j = 0; j < N; ++j)
      d.max_population_mismatch = std::max(d.max_population_mismatch, std::abs(pp[j] - pm[j]));
  }
  d.spectrum_even = d.max_spectrum_mismatch <= 1e-10;
  d.populations_even = d.max_population_mismatch <= 1e-12;
  return d;
}

}  // namespace pumpdeck
