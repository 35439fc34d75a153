#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace krf {

/// Tridiagonal matrix: lower[i] = A(i+1, i), diag[i] = A(i, i), upper[i] = A(i, i+1).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n) : lower(n - 1), diag(n), upper(n - 1) {}
  std::size_t size() const { return diag.size(); }
};

/// Solves A x = b for every right-hand side in place, Gaussian elimination
/// with partial pivoting (the LAPACK gtsv scheme). The matrices arising from
/// the flow are not diagonally dominant near the curve, so plain Thomas
/// elimination is not safe.
inline void solve_tridiagonal(Tridiagonal a, std::span<std::vector<double>> rhs) {
  const std::size_t n = a.size();
  if (n == 1) {
    if (a.diag[0] == 0.0) throw Error("singular tridiagonal system");
    for (auto& b : rhs) b[0] /= a.diag[0];
    return;
  }
  auto& dl = a.lower;  // reused as the second superdiagonal after pivoting
  auto& d = a.diag;
  auto& du = a.upper;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw Error("singular tridiagonal system");
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      for (auto& b : rhs) b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      for (auto& b : rhs) {
        const double bi = b[i];
        b[i] = b[i + 1];
        b[i + 1] = bi - fact * b[i + 1];
      }
    }
  }
  if (d[n - 1] == 0.0) throw Error("singular tridiagonal system");
  for (auto& b : rhs) {
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
  }
}

inline std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::vector<double> b) {
  std::vector<std::vector<double>> rhs{std::move(b)};
  solve_tridiagonal(a, rhs);
  return std::move(rhs.front());
}

/// Solves (T + u e_0^T) x = b, a tridiagonal matrix plus a dense first
/// column, by Sherman-Morrison.
inline std::vector<double> solve_bordered(const Tridiagonal& t, std::vector<double> column0,
                                          std::vector<double> b) {
  std::vector<std::vector<double>> rhs{std::move(b), std::move(column0)};
  solve_tridiagonal(t, rhs);
  const auto& z = rhs[0];
  const auto& w = rhs[1];
  const double denom = 1.0 + w[0];
  if (denom == 0.0) throw Error("singular bordered system");
  std::vector<double> x(z.size());
  const double scale = z[0] / denom;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] - w[i] * scale;
  return x;
}

}  // namespace krf
