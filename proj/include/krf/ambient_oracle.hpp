#pragma once

// Independent check of the radial reduction: complex Hessians of a
// potential U(z) = u(log|z|^2) computed by finite differences in the four
// real coordinates of C^2, in extended precision.

#include <array>
#include <cmath>
#include <complex>

#include "errors.hpp"
#include "jet.hpp"

namespace krf {

using Real = long double;
using Point4 = std::array<Real, 4>;  // (x1, y1, x2, y2), z^k = x_k + i y_k

struct Hermitian2 {
  Real a11;                // H_{1 1bar}
  Real a22;                // H_{2 2bar}
  std::complex<Real> a12;  // H_{1 2bar}; H_{2 1bar} = conj(a12)

  Real trace() const { return a11 + a22; }
  Real det() const { return a11 * a22 - std::norm(a12); }

  /// Eigenvalues, ascending.
  std::array<Real, 2> eigenvalues() const {
    const Real mean = 0.5L * (a11 + a22);
    const Real half_gap = std::sqrt(0.25L * (a11 - a22) * (a11 - a22) + std::norm(a12));
    return {mean - half_gap, mean + half_gap};
  }

  /// tr(this^{-1} other), the trace of `other` with respect to this metric.
  Real trace_of(const Hermitian2& other) const {
    // inverse of [[a, b],[conj b, d]] is [[d, -b],[-conj b, a]] / det
    const std::complex<Real> cross = a12 * std::conj(other.a12);
    return (a22 * other.a11 + a11 * other.a22 - 2.0L * cross.real()) / det();
  }
};

/// Point z in C^2 as real coordinates.
inline Point4 point(std::complex<double> z1, std::complex<double> z2) {
  return {Real(z1.real()), Real(z1.imag()), Real(z2.real()), Real(z2.imag())};
}

inline Real norm2(const Point4& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]; }

namespace detail {

template <typename F>
Real second_partial(const F& f, Point4 x, int a, int b, Real h) {
  auto at = [&](Real da, Real db) {
    Point4 y = x;
    y[a] += da;
    y[b] += db;
    return f(y);
  };
  if (a == b) {
    return (-at(2 * h, 0) + 16 * at(h, 0) - 30 * at(0, 0) + 16 * at(-h, 0) - at(-2 * h, 0)) / (12 * h * h);
  }
  auto mixed = [&](Real k) { return (at(k, k) - at(k, -k) - at(-k, k) + at(-k, -k)) / (4 * k * k); };
  return (4 * mixed(h) - mixed(2 * h)) / 3;  // Richardson: fourth order
}

}  // namespace detail

/// d^2 F / dz^i dzbar^j by fourth-order finite differences.
template <typename F>
Hermitian2 complex_hessian(const F& f, const Point4& x, Real step) {
  auto d = [&](int a, int b) { return detail::second_partial(f, x, a, b, step); };
  // d_{z_i} d_{zbar_j} = 1/4 [(dx_i dx_j + dy_i dy_j) + i (dx_i dy_j - dy_i dx_j)]
  Hermitian2 h;
  h.a11 = 0.25L * (d(0, 0) + d(1, 1));
  h.a22 = 0.25L * (d(2, 2) + d(3, 3));
  h.a12 = std::complex<Real>(0.25L * (d(0, 2) + d(1, 3)), 0.25L * (d(0, 3) - d(1, 2)));
  return h;
}

/// Oracle steps are relative to |z|.
struct OracleSteps {
  Real hessian = 1e-3L;
  Real curvature = 5e-3L;
};

inline void check_resolution(const Point4& x, Real step) {
  if (!(step > 0) || step > 0.05L * std::sqrt(norm2(x))) throw Error("oracle resolution");
}

/// The radial potential as a function on R^4.
template <typename Potential>
auto ambient_potential(const Potential& potential) {
  return [&potential](const Point4& y) { return Real(potential(Real(std::log(norm2(y))))); };
}

/// Complex Hessian of u(log|z|^2) at z, i.e. the metric g_{i jbar}.
template <typename Potential>
Hermitian2 ambient_hessian_oracle(const Potential& potential, const Point4& x, OracleSteps steps = {}) {
  const Real step = steps.hessian * std::sqrt(norm2(x));
  check_resolution(x, step);
  return complex_hessian(ambient_potential(potential), x, step);
}

/// Laplacian tr_g ddbar f of a radial function f under the potential's metric.
template <typename Potential, typename Function>
Real ambient_laplacian(const Potential& potential, const Function& f, const Point4& x, OracleSteps steps = {}) {
  const Real step = steps.hessian * std::sqrt(norm2(x));
  check_resolution(x, step);
  const auto g = complex_hessian(ambient_potential(potential), x, step);
  const auto hf = complex_hessian(ambient_potential(f), x, step);
  return g.trace_of(hf);
}

/// R = -tr_g ddbar log det g, with log det g itself from finite differences.
template <typename Potential>
Real ambient_scalar_curvature(const Potential& potential, const Point4& x, OracleSteps steps = {}) {
  const Real radius = std::sqrt(norm2(x));
  const Real inner = steps.hessian * radius;
  const Real outer = steps.curvature * radius;
  check_resolution(x, outer);
  auto u = ambient_potential(potential);
  auto log_det = [&](const Point4& y) { return std::log(complex_hessian(u, y, inner).det()); };
  const auto g = complex_hessian(u, x, inner);
  const auto ric = complex_hessian(log_det, x, outer);
  return -g.trace_of(ric);
}

}  // namespace krf
