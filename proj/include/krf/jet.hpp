#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace krf {

/// Truncated Taylor jet: value and the first N derivatives of a function of
/// one real variable. Closed-form radial potentials are written once as
/// generic callables and evaluated on jets to obtain exact derivatives.
template <std::size_t N, typename T = double>
struct Jet {
  static_assert(N <= 8, "binomial table covers orders up to 8");
  std::array<T, N + 1> d{};  // d[k] = k-th derivative

  constexpr Jet() = default;
  constexpr Jet(T value) { d[0] = value; }  // NOLINT: implicit constant lift

  static constexpr Jet variable(T x) {
    Jet j(x);
    if constexpr (N >= 1) j.d[1] = T(1);
    return j;
  }

  constexpr T value() const { return d[0]; }
  constexpr T operator[](std::size_t k) const { return d[k]; }
};

namespace detail {

inline constexpr std::array<std::array<double, 9>, 9> kBinomial = [] {
  std::array<std::array<double, 9>, 9> b{};
  for (std::size_t n = 0; n < 9; ++n) {
    b[n][0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) b[n][k] = b[n - 1][k - 1] + (k < n ? b[n - 1][k] : 0.0);
  }
  return b;
}();

// Faa di Bruno via the recurrence h' = f'(g) g': given the derivatives of
// the outer function's derivative composed with g (as a jet of order N-1),
// integrate once.
template <std::size_t N, typename T>
Jet<N, T> integrate_chain(T value, const Jet<N, T>& outer_prime_of_g, const Jet<N, T>& g) {
  // h' = (f' o g) * g'; Leibniz for the k-th derivative of the product.
  Jet<N, T> h;
  h.d[0] = value;
  for (std::size_t k = 1; k <= N; ++k) {
    T acc = 0;
    for (std::size_t j = 0; j < k; ++j) {
      acc += T(kBinomial[k - 1][j]) * outer_prime_of_g.d[j] * g.d[k - j];
    }
    h.d[k] = acc;
  }
  return h;
}

}  // namespace detail

template <std::size_t N, typename T>
constexpr Jet<N, T> operator+(Jet<N, T> a, const Jet<N, T>& b) {
  for (std::size_t k = 0; k <= N; ++k) a.d[k] += b.d[k];
  return a;
}
template <std::size_t N, typename T>
constexpr Jet<N, T> operator-(Jet<N, T> a, const Jet<N, T>& b) {
  for (std::size_t k = 0; k <= N; ++k) a.d[k] -= b.d[k];
  return a;
}
template <std::size_t N, typename T>
constexpr Jet<N, T> operator-(Jet<N, T> a) {
  for (auto& x : a.d) x = -x;
  return a;
}
template <std::size_t N, typename T>
constexpr Jet<N, T> operator*(const Jet<N, T>& a, const Jet<N, T>& b) {
  Jet<N, T> c;
  for (std::size_t k = 0; k <= N; ++k) {
    T acc = 0;
    for (std::size_t j = 0; j <= k; ++j) acc += T(detail::kBinomial[k][j]) * a.d[j] * b.d[k - j];
    c.d[k] = acc;
  }
  return c;
}
template <std::size_t N, typename T>
constexpr Jet<N, T> operator/(const Jet<N, T>& a, const Jet<N, T>& b) {
  // c = a / b  <=>  c b = a; solve order by order.
  Jet<N, T> c;
  for (std::size_t k = 0; k <= N; ++k) {
    T acc = a.d[k];
    for (std::size_t j = 0; j < k; ++j) acc -= T(detail::kBinomial[k][j]) * c.d[j] * b.d[k - j];
    c.d[k] = acc / b.d[0];
  }
  return c;
}

#define KRF_JET_SCALAR_OPS(OP)                                                       \
  template <std::size_t N, typename T>                                               \
  constexpr Jet<N, T> operator OP(const Jet<N, T>& a, std::type_identity_t<T> s) { return a OP Jet<N, T>(s); } \
  template <std::size_t N, typename T>                                               \
  constexpr Jet<N, T> operator OP(std::type_identity_t<T> s, const Jet<N, T>& a) { return Jet<N, T>(s) OP a; }
KRF_JET_SCALAR_OPS(+)
KRF_JET_SCALAR_OPS(-)
KRF_JET_SCALAR_OPS(*)
KRF_JET_SCALAR_OPS(/)
#undef KRF_JET_SCALAR_OPS

template <std::size_t N, typename T>
Jet<N, T> exp(const Jet<N, T>& g) {
  // h = e^g, h' = h g'
  Jet<N, T> h;
  h.d[0] = std::exp(g.d[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    T acc = 0;
    for (std::size_t j = 0; j < k; ++j) acc += T(detail::kBinomial[k - 1][j]) * h.d[j] * g.d[k - j];
    h.d[k] = acc;
  }
  return h;
}

template <std::size_t N, typename T>
Jet<N, T> log(const Jet<N, T>& g) {
  // h' = g' / g
  Jet<N, T> inv = Jet<N, T>(T(1)) / g;
  return detail::integrate_chain(std::log(g.d[0]), inv, g);
}

template <std::size_t N, typename T>
Jet<N, T> sqrt(const Jet<N, T>& g) {
  // h = sqrt(g): h * h = g, solve order by order.
  Jet<N, T> h;
  h.d[0] = std::sqrt(g.d[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    T acc = g.d[k];
    for (std::size_t j = 1; j < k; ++j) acc -= T(detail::kBinomial[k][j]) * h.d[j] * h.d[k - j];
    h.d[k] = acc / (T(2) * h.d[0]);
  }
  return h;
}

template <std::size_t N, typename T>
Jet<N, T> sin(const Jet<N, T>& g) {
  Jet<N, T> s, c;
  s.d[0] = std::sin(g.d[0]);
  c.d[0] = std::cos(g.d[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    T as = 0, ac = 0;
    for (std::size_t j = 0; j < k; ++j) {
      as += T(detail::kBinomial[k - 1][j]) * c.d[j] * g.d[k - j];
      ac -= T(detail::kBinomial[k - 1][j]) * s.d[j] * g.d[k - j];
    }
    s.d[k] = as;
    c.d[k] = ac;
  }
  return s;
}

template <std::size_t N, typename T>
Jet<N, T> cos(const Jet<N, T>& g) {
  constexpr double kHalfPi = 1.57079632679489661923;
  return sin(g + Jet<N, T>(T(kHalfPi)));
}

// Scalar overloads: generic potentials call krf::exp etc. and instantiate on
// double, long double, or jets.
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

}  // namespace krf
