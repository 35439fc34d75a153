#pragma once

// The flat conical comparison metric
//
//   g = |u|^{-4/3} |du|^2 + |v|^{-4/3} |dv|^2
//
// on the punctured bidisc, and its comparison with the single-curve flow
// metric written in the chart u = (z^1)^2, v = z^2 / z^1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "ambient_oracle.hpp"
#include "ansatz.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "graph.hpp"

namespace krf {

/// The conical metric at (u, v), coordinates packed as (Re u, Im u, Re v, Im v).
inline Hermitian2 conical_metric(const Point4& x) {
  const Real u2 = x[0] * x[0] + x[1] * x[1];
  const Real v2 = x[2] * x[2] + x[3] * x[3];
  return {std::pow(u2, Real(-2) / 3), std::pow(v2, Real(-2) / 3), {0, 0}};
}

inline Hermitian2 euclidean_metric(const Point4&) { return {1, 1, {0, 0}}; }

using Curvature = std::array<std::complex<Real>, 16>;  // R_{i jbar k lbar} at index 8i + 4j + 2k + l

namespace detail {

using CMat2 = std::array<std::array<std::complex<Real>, 2>, 2>;

inline CMat2 as_matrix(const Hermitian2& h) {
  return {{{std::complex<Real>(h.a11), h.a12}, {std::conj(h.a12), std::complex<Real>(h.a22)}}};
}

inline CMat2 inverse(const CMat2& m) {
  const auto det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

template <typename F>
std::complex<Real> real_partial(const F& f, const Point4& x, int a, Real h) {
  auto at = [&](Real d) {
    Point4 y = x;
    y[a] += d;
    return f(y);
  };
  return (-at(2 * h) + Real(8) * at(h) - Real(8) * at(-h) + at(-2 * h)) / (12 * h);
}

}  // namespace detail

/// Full curvature tensor R_{i jbar k lbar} = -d_k d_lbar g_{i jbar} + g^{q pbar} d_k g_{i qbar} d_lbar g_{p jbar}
/// of a Hermitian metric field, by fourth-order finite differences.
template <typename Metric>
Curvature curvature_tensor(const Metric& metric, const Point4& x, Real step) {
  using C = std::complex<Real>;
  const C I(0, 1);
  const auto g = detail::as_matrix(metric(x));
  const auto ginv = detail::inverse(g);

  // dz[k][i][j] = d_{z_k} g_{i jbar}, dzb[l][i][j] = d_{zbar_l} g_{i jbar}, ddb[k][l][i][j].
  std::array<detail::CMat2, 2> dz{}, dzb{};
  std::array<std::array<detail::CMat2, 2>, 2> ddb{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto re = [&](const Point4& y) { return detail::as_matrix(metric(y))[i][j].real(); };
      auto im = [&](const Point4& y) { return detail::as_matrix(metric(y))[i][j].imag(); };
      auto entry = [&](const Point4& y) { return detail::as_matrix(metric(y))[i][j]; };
      std::array<C, 4> grad;
      for (int a = 0; a < 4; ++a) grad[a] = detail::real_partial(entry, x, a, step);
      std::array<std::array<C, 4>, 4> hess;
      for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
          hess[a][b] = hess[b][a] = C(detail::second_partial(re, x, a, b, step), detail::second_partial(im, x, a, b, step));
        }
      }
      for (int k = 0; k < 2; ++k) {
        dz[k][i][j] = Real(0.5) * (grad[2 * k] - I * grad[2 * k + 1]);
        dzb[k][i][j] = Real(0.5) * (grad[2 * k] + I * grad[2 * k + 1]);
        for (int l = 0; l < 2; ++l) {
          const int xk = 2 * k, yk = 2 * k + 1, xl = 2 * l, yl = 2 * l + 1;
          ddb[k][l][i][j] = Real(0.25) * (hess[xk][xl] + hess[yk][yl] + I * (hess[xk][yl] - hess[yk][xl]));
        }
      }
    }
  }

  Curvature r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          C value = -ddb[k][l][i][j];
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) value += dz[k][i][q] * ginv[q][p] * dzb[l][p][j];
          r[8 * i + 4 * j + 2 * k + l] = value;
        }
  return r;
}

/// Largest component of the curvature tensor in a unitary frame of g.
template <typename Metric>
Real curvature_magnitude(const Metric& metric, const Point4& x, Real step) {
  const auto r = curvature_tensor(metric, x, step);
  // Cholesky g = L L^*, frame e = L^{-1}.
  const auto g = detail::as_matrix(metric(x));
  const Real l00 = std::sqrt(g[0][0].real());
  const auto l10 = g[1][0] / l00;
  const Real l11 = std::sqrt(g[1][1].real() - std::norm(l10));
  using C = std::complex<Real>;
  const std::array<std::array<C, 2>, 2> e{{{C(1 / l00), C(0)}, {-l10 / (l00 * l11), C(1 / l11)}}};
  Real worst = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          C sum(0, 0);
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                  sum += e[a][i] * std::conj(e[b][j]) * e[c][k] * std::conj(e[d][l]) * r[8 * i + 4 * j + 2 * k + l];
                }
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

struct FlatnessReport {
  double max_curvature;
  int evaluated;
  int skipped;  // samples too close to an axis for the step
};

struct FlatnessSampling {
  double radius_min = 0.2;
  double radius_max = 0.8;
  double relative_step = 1e-3;  // step = relative_step * distance to the nearer axis
  double axis_floor = 1e-2;     // samples nearer than this to an axis are skipped
};

/// Max curvature magnitude at random points of the bidisc shell.
template <typename Metric>
FlatnessReport con_flatness_check(int sample_count, std::uint64_t seed, const Metric& metric,
                                  const FlatnessSampling& sampling = {}) {
  if (sample_count <= 0) throw Error("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(sampling.radius_min, sampling.radius_max);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  FlatnessReport report{0.0, 0, 0};
  for (int k = 0; k < sample_count; ++k) {
    const auto u = std::polar(radius(rng), angle(rng));
    const auto v = std::polar(radius(rng), angle(rng));
    const double axis = std::min(std::abs(u), std::abs(v));
    if (axis < sampling.axis_floor) {
      ++report.skipped;
      continue;
    }
    const Point4 x = point(u, v);
    const Real step = Real(sampling.relative_step * axis);
    report.max_curvature = std::max(report.max_curvature, double(curvature_magnitude(metric, x, step)));
    ++report.evaluated;
  }
  return report;
}

inline FlatnessReport con_flatness_check(int sample_count, std::uint64_t seed = 1) {
  return con_flatness_check(sample_count, seed, conical_metric);
}

/// Length of lambda -> (lambda u0, lambda v0), lambda in [0, 1].
inline double con_path_length(std::complex<double> u0, std::complex<double> v0) {
  if (u0 == 0.0 && v0 == 0.0) throw Error("path length needs a nonzero endpoint");
  return 3.0 * std::sqrt(std::cbrt(std::norm(u0)) + std::cbrt(std::norm(v0)));
}

/// The same length by Gauss-Legendre quadrature of the metric norm of the
/// velocity, after lambda = mu^3 removes the endpoint singularity.
inline double con_path_length_quadrature(std::complex<double> u0, std::complex<double> v0, int panels = 16) {
  static constexpr std::array<double, 5> node{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                              0.9061798459386640};
  static constexpr std::array<double, 5> weight{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                0.2369268850561891, 0.2369268850561891};
  auto speed = [&](double mu) {
    const double lambda = mu * mu * mu;
    const auto g = conical_metric(point(lambda * u0, lambda * v0));
    const double dlam = 3.0 * mu * mu;
    return dlam * std::sqrt(double(g.a11) * std::norm(u0) + double(g.a22) * std::norm(v0));
  };
  double total = 0.0;
  const double width = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (std::size_t q = 0; q < node.size(); ++q) total += 0.5 * width * weight[q] * speed(mid + 0.5 * width * node[q]);
  }
  return total;
}

struct BallDiameter {
  double upper_bound;  // two radial paths through the origin from the worst corner
  double graph;        // Dijkstra estimate on a sampled grid
};

/// Diameter of the one-variable disc {|u| <= delta} under |u|^{-4/3}|du|^2,
/// by shortest paths on a Cartesian grid with 16-neighbour connectivity.
/// Nodes sit at cell centres so the cone point is never a node.
inline double conical_disc_diameter_graph(double delta, int cells = 48) {
  const double h = 2.0 * delta / cells;
  std::vector<std::ptrdiff_t> index(static_cast<std::size_t>(cells * cells), -1);
  std::vector<std::complex<double>> pos;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      const std::complex<double> z(-delta + (i + 0.5) * h, -delta + (j + 0.5) * h);
      if (std::abs(z) <= delta) {
        index[static_cast<std::size_t>(i * cells + j)] = static_cast<std::ptrdiff_t>(pos.size());
        pos.push_back(z);
      }
    }
  // Edge length: integral of |z|^{-2/3} |dz| along the segment, Gauss-Legendre.
  auto length = [](std::complex<double> a, std::complex<double> b) {
    static constexpr std::array<double, 3> node{0.0, -0.7745966692414834, 0.7745966692414834};
    static constexpr std::array<double, 3> weight{0.8888888888888888, 0.5555555555555556, 0.5555555555555556};
    constexpr int panels = 4;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) / panels;
      for (std::size_t q = 0; q < 3; ++q) {
        const double s = mid + 0.5 / panels * node[q];
        sum += 0.5 / panels * weight[q] * std::pow(std::norm(a + s * (b - a)), -1.0 / 3.0);
      }
    }
    return sum * std::abs(b - a);
  };
  WeightedGraph graph(pos.size());
  static constexpr std::array<std::array<int, 2>, 8> steps{
      {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1}, {1, -2}}};
  std::vector<std::size_t> boundary;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      const auto a = index[static_cast<std::size_t>(i * cells + j)];
      if (a < 0) continue;
      bool on_edge = false;
      for (const auto& [di, dj] : std::array<std::array<int, 2>, 4>{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}}) {
        const int ni = i + di, nj = j + dj;
        if (ni < 0 || nj < 0 || ni >= cells || nj >= cells || index[static_cast<std::size_t>(ni * cells + nj)] < 0) {
          on_edge = true;
        }
      }
      if (on_edge) boundary.push_back(static_cast<std::size_t>(a));
      for (const auto& [di, dj] : steps) {
        const int ni = i + di, nj = j + dj;
        if (ni < 0 || nj < 0 || ni >= cells || nj >= cells) continue;
        const auto b = index[static_cast<std::size_t>(ni * cells + nj)];
        if (b < 0) continue;
        graph.add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                       length(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]));
      }
    }
  double diameter = 0.0;
  for (std::size_t src : boundary) {
    const auto dist = connected_shortest_paths(graph, src);
    for (std::size_t b : boundary) diameter = std::max(diameter, dist[b]);
  }
  return diameter;
}

/// Diameter of {|u| <= delta, |v| <= delta}. The metric is a product, so
/// the graph estimate is sqrt(2) times the one-variable disc diameter.
inline BallDiameter con_ball_diameter(double delta, int cells = 48) {
  if (!(delta > 0.0)) throw Error("ball radius must be positive");
  return {2.0 * con_path_length(delta, delta), std::sqrt(2.0) * conical_disc_diameter_graph(delta, cells)};
}

struct ChartSampling {
  double v_floor = 0.3;
  int u_points = 64;
  int v_points = 16;
  double exclusion = 0.05;
};

/// sup over chart points of max(g_{u ubar}|u|^{4/3}, g_{v vbar}|v|^{4/3})
/// for the radial metric of `p`, over |v| in [v_floor, 1] and |u| such that
/// rho = log(|u|(1+|v|^2)) falls inside the interior of the grid.
inline double con_compare_flow_chart(const PotentialProfile& p, const ChartSampling& sampling = {}) {
  if (!(sampling.v_floor > 0.0 && sampling.v_floor < 1.0)) throw Error("v_floor must lie in (0, 1)");
  p.require_positive();
  const auto [first, last] = p.grid.interior(sampling.exclusion);
  const double rho_lo = p.grid[first];
  const double rho_hi = p.grid[last - 1];
  double sup = 0.0;
  for (int a = 0; a < sampling.v_points; ++a) {
    const double v = sampling.v_floor + (1.0 - sampling.v_floor) * a / std::max(1, sampling.v_points - 1);
    const double w = 1.0 + v * v;
    // log|u| range keeping rho inside [rho_lo, rho_hi]
    const double lu_lo = rho_lo - std::log(w);
    const double lu_hi = rho_hi - std::log(w);
    for (int b = 0; b < sampling.u_points; ++b) {
      const double lu = lu_lo + (lu_hi - lu_lo) * b / std::max(1, sampling.u_points - 1);
      const double u = std::exp(lu);
      const double rho = std::clamp(lu + std::log(w), rho_lo, rho_hi);
      const double d1 = interpolate(p.du, p.grid, rho);
      const double d2 = interpolate(p.ddu, p.grid, rho);
      const double g_uu = d2 / (4.0 * u * u);
      const double g_vv = d1 / w + (d2 - d1) * v * v / (w * w);
      sup = std::max({sup, g_uu * std::pow(u, 4.0 / 3.0), g_vv * std::pow(v, 4.0 / 3.0)});
    }
  }
  return sup;
}

inline double con_compare_flow_chart(const FlowState& snap, const ChartSampling& sampling = {}) {
  return con_compare_flow_chart(snap.potential(), sampling);
}

}  // namespace krf
