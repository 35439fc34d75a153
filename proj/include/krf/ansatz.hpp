#pragma once

// Reduction of U(2)-invariant Kähler geometry on C^2 \ {0} to radial
// profiles. A potential u(rho), rho = log|z|^2, s = e^rho, gives
//
//   g_{i jbar} = (u'/s) delta_ij + (u'' - u') zbar_i z_j / s^2
//
// with the complex-radial eigenvalue u''/s and the tangential eigenvalue
// u'/s. All ddbar operators omit the 1/(2 pi) normalization.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "jet.hpp"

namespace krf {

/// Radial potential sampled on a grid with its first two rho-derivatives.
struct PotentialProfile {
  RadialGrid grid;
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> ddu;

  /// Profile whose derivatives come from `differentiate`.
  static PotentialProfile from_values(const RadialGrid& grid, std::vector<double> values) {
    auto d = differentiate(values, grid);
    return {grid, std::move(values), std::move(d.first), std::move(d.second)};
  }

  /// Exact derivatives of a closed-form potential (a generic callable).
  template <typename Potential>
  static PotentialProfile from_closed_form(const RadialGrid& grid, const Potential& potential) {
    PotentialProfile p{grid, {}, {}, {}};
    const std::size_t n = grid.size();
    p.u.resize(n);
    p.du.resize(n);
    p.ddu.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = potential(Jet<2>::variable(grid[i]));
      p.u[i] = j[0];
      p.du[i] = j[1];
      p.ddu[i] = j[2];
    }
    return p;
  }

  std::size_t size() const { return u.size(); }

  /// Throws DegenerateMetric at the first node with du <= 0 or ddu <= 0.
  void require_positive() const {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!(du[i] > 0.0)) throw DegenerateMetric(i, grid[i], "u' = " + std::to_string(du[i]));
      if (!(ddu[i] > 0.0)) throw DegenerateMetric(i, grid[i], "u'' = " + std::to_string(ddu[i]));
    }
  }
};

/// Eigen-decomposition of the metric relative to the flat metric.
struct MetricProfile {
  std::vector<double> lam_rad;  // u''/s
  std::vector<double> lam_tan;  // u'/s
  std::vector<double> vnorm2;   // |V|^2 = u''
  std::vector<double> det_rel;  // omega^2 / omega_Eucl^2 = u' u'' e^{-2 rho}
};

inline MetricProfile metric_from_potential(const PotentialProfile& p) {
  p.require_positive();
  const std::size_t n = p.size();
  MetricProfile m{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                  std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_s = std::exp(-p.grid[i]);
    m.lam_rad[i] = p.ddu[i] * inv_s;
    m.lam_tan[i] = p.du[i] * inv_s;
    m.vnorm2[i] = p.ddu[i];
    m.det_rel[i] = m.lam_rad[i] * m.lam_tan[i];
  }
  return m;
}

/// Monge-Ampère density u' u'' e^{-2 rho}.
inline std::vector<double> ma_density(const PotentialProfile& p) { return metric_from_potential(p).det_rel; }

/// Laplacian of a radial function: f''/u'' + f'/u'.
inline std::vector<double> laplacian_radial(std::span<const double> f, const PotentialProfile& p) {
  p.require_positive();
  const auto d = differentiate(f, p.grid);
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d.second[i] / p.ddu[i] + d.first[i] / p.du[i];
  return out;
}

/// log(u' u'' e^{-2 rho}), computed from the stored derivatives.
inline std::vector<double> log_density(const PotentialProfile& p) {
  p.require_positive();
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(p.du[i]) + std::log(p.ddu[i]) - 2.0 * p.grid[i];
  return out;
}

/// Scalar curvature R = tr_omega Ric = -Laplacian(log det). With this
/// complex-trace convention an Einstein metric Ric = -omega has R = -2; the
/// Riemannian scalar curvature is 2R.
inline std::vector<double> scalar_curvature(const PotentialProfile& p) {
  auto r = laplacian_radial(log_density(p), p);
  for (auto& x : r) x = -x;
  return r;
}

/// Pointwise reduction of a closed-form potential, exact up to rounding.
struct PointGeometry {
  double lam_rad;
  double lam_tan;
  double vnorm2;
  double det_rel;
  double scalar_curvature;
};

template <typename Potential>
PointGeometry reduce_at(const Potential& potential, double rho) {
  const auto j = potential(Jet<4>::variable(rho));
  const double u1 = j[1], u2 = j[2], u3 = j[3], u4 = j[4];
  if (!(u1 > 0.0) || !(u2 > 0.0)) throw DegenerateMetric(0, rho, "closed-form potential not convex-increasing");
  const double s = std::exp(rho);
  // L = log u' + log u'' - 2 rho
  const double l1 = u2 / u1 + u3 / u2 - 2.0;
  const double l2 = u3 / u1 - (u2 / u1) * (u2 / u1) + u4 / u2 - (u3 / u2) * (u3 / u2);
  return {u2 / s, u1 / s, u2, u1 * u2 / (s * s), -(l2 / u2 + l1 / u1)};
}

/// Laplacian of a closed-form radial function f under a closed-form potential.
template <typename Potential, typename Function>
double laplacian_at(const Potential& potential, const Function& f, double rho) {
  const auto u = potential(Jet<2>::variable(rho));
  const auto g = f(Jet<2>::variable(rho));
  return g[2] / u[2] + g[1] / u[1];
}

}  // namespace krf
