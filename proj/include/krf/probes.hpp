#pragma once

// Estimate constants evaluated on flow snapshots. Every sup is taken over
// the interior nodes that remain after dropping `exclusion` of the grid at
// each end.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "ansatz.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "model.hpp"

namespace krf {

struct ProbeParams {
  double A = 10.0;           // barrier exponent weight
  double lambda = 1.0;       // exponent of the a priori bound omega <= C |sigma|^{-2 lambda} omega_0
  double delta_exp = 0.25;   // improvement exponent in the weighted trace bound
  double exclusion = 0.05;   // fraction of nodes dropped at each end

  void validate() const {
    if (!(A >= 1.0)) throw Error("probes.A must be >= 1");
    if (!(lambda > 0.0)) throw Error("probes.lambda must be positive");
    if (!(delta_exp > 0.0 && delta_exp < 1.0)) throw Error("probes.delta_exp must lie in (0, 1)");
    if (!(exclusion >= 0.0 && exclusion < 0.5)) throw Error("probes.exclusion must lie in [0, 0.5)");
  }
};

namespace detail {

template <typename F>
double interior_sup(const RadialGrid& grid, double exclusion, F&& value) {
  const auto [first, last] = grid.interior(exclusion);
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i < last; ++i) sup = std::max(sup, value(i));
  return sup;
}

}  // namespace detail

/// omega <= (C/r^2) omega_Eucl: both eigenvalues times r^2, i.e. max(psi', psi'').
inline double euclidean_trace_constant(const PotentialProfile& p, const ProbeParams& params = {}) {
  p.require_positive();
  return detail::interior_sup(p.grid, params.exclusion, [&](std::size_t i) { return std::max(p.du[i], p.ddu[i]); });
}

/// omega <= C r^{-2(1-delta)} (omega_0 + omega_Eucl), per eigen-direction.
inline double weighted_trace_constant(const PotentialProfile& p, const PotentialProfile& u0,
                                      const ProbeParams& params = {}) {
  p.require_positive();
  return detail::interior_sup(p.grid, params.exclusion, [&](std::size_t i) {
    const double s = p.grid.s(i);
    const double weight = std::exp(p.grid[i] * (1.0 - params.delta_exp));
    return weight * std::max(p.ddu[i] / (u0.ddu[i] + s), p.du[i] / (u0.du[i] + s));
  });
}

/// |V|^2_omega <= C r^{4/3}: sup of psi'' e^{-2 rho / 3}.
inline double vfield_constant(const PotentialProfile& p, const ProbeParams& params = {}) {
  p.require_positive();
  return detail::interior_sup(p.grid, params.exclusion,
                              [&](std::size_t i) { return p.ddu[i] * std::exp(-2.0 * p.grid[i] / 3.0); });
}

/// (tr_{omega_0} omega)^{1/A} |sigma|_h tr_{omega_Eucl} omega <= C, with
/// |sigma|_h = r^2 and a single curve in the model.
inline double barrier_constant(const PotentialProfile& p, const PotentialProfile& u0,
                               const ProbeParams& params = {}) {
  p.require_positive();
  return detail::interior_sup(p.grid, params.exclusion, [&](std::size_t i) {
    const double tr0 = p.ddu[i] / u0.ddu[i] + p.du[i] / u0.du[i];
    const double tr_eucl = (p.ddu[i] + p.du[i]) * std::exp(-p.grid[i]);
    return std::pow(tr0, 1.0 / params.A) * std::sqrt(section_norm(p.grid[i])) * tr_eucl;
  });
}

inline double euclidean_trace_constant(const FlowState& snap, const ProbeParams& params = {}) {
  return euclidean_trace_constant(snap.potential(), params);
}

inline double weighted_trace_constant(const FlowState& snap, const ProbeParams& params = {}) {
  return weighted_trace_constant(snap.potential(), snap.fam->u_0(), params);
}

inline double vfield_constant(const FlowState& snap, const ProbeParams& params = {}) {
  return vfield_constant(snap.potential(), params);
}

inline double barrier_constant(const FlowState& snap, const ProbeParams& params = {}) {
  return barrier_constant(snap.potential(), snap.fam->u_0(), params);
}

struct AprioriBounds {
  double sup_phi;
  double sup_phidot;
  double sup_R;
};

/// |phi| + |phi_dot| + |R| <= C, each term separately.
inline AprioriBounds a_priori_bounds(const FlowState& snap, const ProbeParams& params = {}) {
  const auto p = snap.potential();
  const auto phi = snap.phi();
  const auto phidot = rhs(snap);
  const auto curvature = scalar_curvature(p);
  return {detail::interior_sup(p.grid, params.exclusion, [&](std::size_t i) { return std::abs(phi[i]); }),
          detail::interior_sup(p.grid, params.exclusion, [&](std::size_t i) { return std::abs(phidot[i]); }),
          detail::interior_sup(p.grid, params.exclusion, [&](std::size_t i) { return std::abs(curvature[i]); })};
}

/// (d/dt - Laplacian) log tr_{omega_Eucl} omega + 1 at every node, time
/// derivative by centered differences across three profiles `gap` apart.
/// A flow solution has this <= 0 up to discretization error.
inline std::vector<double> schwarz_residual(const PotentialProfile& prev, const PotentialProfile& mid,
                                            const PotentialProfile& next, double gap) {
  if (!(gap > 0.0)) throw Error("schwarz residual needs a positive time gap");
  auto log_trace = [](const PotentialProfile& p) {
    p.require_positive();
    std::vector<double> f(p.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::log(p.ddu[i] + p.du[i]) - p.grid[i];
    return f;
  };
  const auto f = log_trace(mid);
  const auto f_prev = log_trace(prev);
  const auto f_next = log_trace(next);
  const auto lap = laplacian_radial(f, mid);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (f_next[i] - f_prev[i]) / (2.0 * gap) - lap[i] + 1.0;
  return out;
}

inline std::vector<double> schwarz_residual(const FlowState& prev, const FlowState& snap, const FlowState& next) {
  const double gap_a = snap.t - prev.t;
  const double gap_b = next.t - snap.t;
  if (!(gap_a > 0.0) || std::abs(gap_a - gap_b) > 1e-9 * std::max(gap_a, gap_b)) {
    throw Error("schwarz residual needs equal time gaps");
  }
  return schwarz_residual(prev.potential(), snap.potential(), next.potential(), 0.5 * (gap_a + gap_b));
}

inline double schwarz_max(const FlowState& prev, const FlowState& snap, const FlowState& next,
                          const ProbeParams& params = {}) {
  const auto r = schwarz_residual(prev, snap, next);
  return detail::interior_sup(snap.grid(), params.exclusion, [&](std::size_t i) { return r[i]; });
}

/// Coefficient of rho in psi near the curve, proportional to the curve area.
inline double area_of_curve(const PotentialProfile& p) { return p.du.front() - 2.0 * section_norm(p.grid.rho_min()); }

inline double area_of_curve(const FlowState& snap) { return area_of_curve(snap.potential()); }

/// Length of the radial path from the curve (rho_min) to the orbit at rho_q:
/// integral of sqrt(psi'')/2 d rho, trapezoid rule.
inline double radial_distance(const PotentialProfile& p, double rho_q) {
  p.require_positive();
  const auto& grid = p.grid;
  if (rho_q <= grid.rho_min()) return 0.0;
  rho_q = std::min(rho_q, grid.rho_max());
  auto integrand = [&](std::size_t i) { return 0.5 * std::sqrt(p.ddu[i]); };
  const double h = grid.spacing();
  double length = 0.0;
  std::size_t i = 0;
  for (; i + 1 < grid.size() && grid[i + 1] <= rho_q; ++i) length += 0.5 * h * (integrand(i) + integrand(i + 1));
  if (i + 1 < grid.size() && rho_q > grid[i]) {
    const double w = (rho_q - grid[i]) / h;
    const double end = (1.0 - w) * integrand(i) + w * integrand(i + 1);
    length += 0.5 * (rho_q - grid[i]) * (integrand(i) + end);
  }
  return length;
}

inline double radial_distance(const FlowState& snap, double rho_q) { return radial_distance(snap.potential(), rho_q); }

/// Half the circumference of the fiber circle over the curve: the circle
/// theta in [0, pi) at rho_min with line element sqrt(psi') d theta.
inline double curve_diameter(const PotentialProfile& p) {
  return 0.5 * std::numbers::pi * std::sqrt(p.du.front());
}

inline double curve_diameter(const FlowState& snap) { return curve_diameter(snap.potential()); }

/// Curve diameter plus twice the transverse distance to the orbit at
/// omega_0-distance delta from the curve (identified with r^2 = delta).
inline double tube_diameter(const PotentialProfile& p, double delta) {
  if (!(delta > 0.0)) throw Error("tube radius must be positive");
  return curve_diameter(p) + 2.0 * radial_distance(p, std::log(delta));
}

inline double tube_diameter(const FlowState& snap, double delta) { return tube_diameter(snap.potential(), delta); }

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Radii r_q = 2^{-k} used for distance-scaling fits.
inline std::vector<double> scaling_radii(int k_first = 1, int k_last = 7) {
  std::vector<double> r;
  for (int k = k_first; k <= k_last; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

/// Log-log slope of radial_distance against the omega_0-distance r_q^2.
inline double distance_exponent(const PotentialProfile& p, const std::vector<double>& radii = scaling_radii()) {
  std::vector<double> x, y;
  for (double r : radii) {
    const double rho = 2.0 * std::log(r);
    x.push_back(rho);
    y.push_back(std::log(radial_distance(p, rho)));
  }
  return fit_slope(x, y);
}

struct DistanceScaling {
  std::vector<double> radii;
  std::vector<double> sup_distance;  // sup over snapshots at each radius
  double exponent;                   // slope against log(r_q^2)
  double constant;                   // max of sup_distance / (r_q^2)^{1/3}
};

inline DistanceScaling distance_scaling(const std::vector<FlowState>& snapshots,
                                        const std::vector<double>& radii = scaling_radii()) {
  DistanceScaling out{radii, std::vector<double>(radii.size(), 0.0), 0.0, 0.0};
  for (const auto& snap : snapshots) {
    const auto p = snap.potential();
    for (std::size_t k = 0; k < radii.size(); ++k) {
      out.sup_distance[k] = std::max(out.sup_distance[k], radial_distance(p, 2.0 * std::log(radii[k])));
    }
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    x.push_back(2.0 * std::log(radii[k]));
    y.push_back(std::log(out.sup_distance[k]));
    out.constant = std::max(out.constant, out.sup_distance[k] / std::cbrt(radii[k] * radii[k]));
  }
  out.exponent = fit_slope(x, y);
  return out;
}

/// One row of the estimate table.
struct EstimateRow {
  double t;
  double K1;
  double K2b;
  double K3;
  double K_barrier;
  double sup_phi;
  double sup_phidot;
  double sup_R;
  double area;
  double schwarz_max;  // NaN unless equally spaced neighbours exist
  double dist_exponent;
  double diam_D;
  std::vector<double> diam_tube;  // one per tube radius
};

struct EstimateReport {
  ProbeParams params;
  std::vector<double> tube_deltas;
  std::vector<EstimateRow> rows;
};

/// Probes on every snapshot. The trace residual is evaluated where a
/// snapshot has neighbours at equal gaps no larger than `max_gap`.
inline EstimateReport estimate_report(const std::vector<FlowState>& snapshots, const ProbeParams& params,
                                      const std::vector<double>& tube_deltas, double max_gap = 1e-2) {
  params.validate();
  EstimateReport report{params, tube_deltas, {}};
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const auto& s = snapshots[k];
    const auto p = s.potential();
    const auto bounds = a_priori_bounds(s, params);
    EstimateRow row{s.t,
                    euclidean_trace_constant(p, params),
                    weighted_trace_constant(p, s.fam->u_0(), params),
                    vfield_constant(p, params),
                    barrier_constant(p, s.fam->u_0(), params),
                    bounds.sup_phi,
                    bounds.sup_phidot,
                    bounds.sup_R,
                    area_of_curve(p),
                    std::numeric_limits<double>::quiet_NaN(),
                    distance_exponent(p),
                    curve_diameter(p),
                    {}};
    if (k > 0 && k + 1 < snapshots.size()) {
      const double a = s.t - snapshots[k - 1].t;
      const double b = snapshots[k + 1].t - s.t;
      if (a <= max_gap && std::abs(a - b) <= 1e-9 * std::max(a, b)) {
        row.schwarz_max = schwarz_max(snapshots[k - 1], s, snapshots[k + 1], params);
      }
    }
    for (double d : tube_deltas) row.diam_tube.push_back(tube_diameter(p, d));
    report.rows.push_back(std::move(row));
  }
  return report;
}

struct Uniformity {
  double max_early;
  double max_all;
  bool pass;
};

/// Max over all rows against `factor` times the max over t <= t_early.
inline Uniformity uniformity(const EstimateReport& report, const std::function<double(const EstimateRow&)>& probe,
                             double t_early = 1.0, double factor = 2.0) {
  Uniformity u{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), false};
  for (const auto& row : report.rows) {
    const double v = probe(row);
    u.max_all = std::max(u.max_all, v);
    if (row.t <= t_early + 1e-12) u.max_early = std::max(u.max_early, v);
  }
  u.pass = std::isfinite(u.max_all) && u.max_all <= factor * u.max_early;
  return u;
}

struct TraceResidualConvergence {
  std::vector<double> dts;
  std::vector<double> max_residual;  // per dt, over probe times
  std::vector<double> defect;        // sup |res(dt_k) - res(dt_{k+1})|, one fewer entry
};

/// Trace residual at fixed probe times for successively halved dt. The
/// residual field itself converges at first order in dt; `defect` measures
/// the distance between consecutive refinements.
inline TraceResidualConvergence trace_residual_convergence(const ModelConfig& model, const ProbeParams& params,
                                                           const std::vector<double>& probe_times, double dt,
                                                           int levels = 3) {
  TraceResidualConvergence out;
  std::vector<std::vector<std::vector<double>>> fields;
  const double t_end = *std::max_element(probe_times.begin(), probe_times.end()) + 2.0 * dt;
  for (int level = 0; level < levels; ++level) {
    StepperConfig cfg;
    cfg.dt = dt / std::ldexp(1.0, level);
    cfg.t_end = t_end;
    cfg.snapshot_times = probe_times;
    cfg.bracket_snapshots = true;
    const auto run = run_flow(cfg, model);
    std::vector<std::vector<double>> per_time;
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : probe_times) {
      auto it = std::find_if(run.snapshots.begin(), run.snapshots.end(),
                             [&](const FlowState& s) { return std::abs(s.t - t) < 1e-12; });
      if (it == run.snapshots.begin() || it == run.snapshots.end() || it + 1 == run.snapshots.end()) {
        throw Error("probe time lacks bracketing snapshots");
      }
      auto r = schwarz_residual(*(it - 1), *it, *(it + 1));
      const auto [first, last] = it->grid().interior(params.exclusion);
      std::vector<double> interior(r.begin() + static_cast<long>(first), r.begin() + static_cast<long>(last));
      worst = std::max(worst, *std::max_element(interior.begin(), interior.end()));
      per_time.push_back(std::move(interior));
    }
    out.dts.push_back(cfg.dt);
    out.max_residual.push_back(worst);
    fields.push_back(std::move(per_time));
  }
  for (int level = 0; level + 1 < levels; ++level) {
    double d = 0.0;
    for (std::size_t k = 0; k < probe_times.size(); ++k) {
      for (std::size_t i = 0; i < fields[level][k].size(); ++i) {
        d = std::max(d, std::abs(fields[level][k][i] - fields[level + 1][k][i]));
      }
    }
    out.defect.push_back(d);
  }
  return out;
}

}  // namespace krf
