#pragma once

// Gromov-Hausdorff bounds between 2-dimensional slices of radial metrics.
// The slice is the real locus z in R^2 / Z_2, parametrized by (rho, theta)
// with theta in [0, pi) and line element
//
//   ds^2 = (u''/4) d rho^2 + u' d theta^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ansatz.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "graph.hpp"
#include "probes.hpp"

namespace krf {

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t m) : m_(m), d_(m * m, 0.0) {}
  DistanceMatrix(std::size_t m, std::vector<double> entries) : m_(m), d_(std::move(entries)) {
    if (d_.size() != m * m) throw Error("distance matrix entry count mismatch");
  }

  std::size_t size() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * m_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * m_ + j]; }

  double max_entry() const { return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end()); }

  /// Largest violation of symmetry, zero diagonal, nonnegativity or the
  /// triangle inequality.
  double metric_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      worst = std::max(worst, std::abs((*this)(i, i)));
      for (std::size_t j = 0; j < m_; ++j) {
        worst = std::max({worst, std::abs((*this)(i, j) - (*this)(j, i)), -(*this)(i, j)});
        for (std::size_t k = 0; k < m_; ++k) worst = std::max(worst, (*this)(i, k) - (*this)(i, j) - (*this)(j, k));
      }
    }
    return worst;
  }

 private:
  std::size_t m_ = 0;
  std::vector<double> d_;
};

using Correspondence = std::vector<std::pair<std::size_t, std::size_t>>;

inline Correspondence identity_correspondence(std::size_t m) {
  Correspondence c;
  for (std::size_t i = 0; i < m; ++i) c.push_back({i, i});
  return c;
}

/// Every index of both spaces must occur.
inline void require_surjective(const Correspondence& corr, std::size_t m1, std::size_t m2) {
  std::vector<bool> left(m1, false), right(m2, false);
  for (const auto& [i, j] : corr) {
    if (i >= m1 || j >= m2) throw Error("correspondence index out of range");
    left[i] = true;
    right[j] = true;
  }
  if (std::find(left.begin(), left.end(), false) != left.end() ||
      std::find(right.begin(), right.end(), false) != right.end()) {
    throw Error("correspondence is not surjective");
  }
}

inline double distortion(const DistanceMatrix& d1, const DistanceMatrix& d2, const Correspondence& corr) {
  double worst = 0.0;
  for (const auto& [i, j] : corr)
    for (const auto& [k, l] : corr) worst = std::max(worst, std::abs(d1(i, k) - d2(j, l)));
  return worst;
}

/// Half the distortion of a correspondence.
inline double gh_upper_bound(const DistanceMatrix& d1, const DistanceMatrix& d2, const Correspondence& corr) {
  require_surjective(corr, d1.size(), d2.size());
  return 0.5 * distortion(d1, d2, corr);
}

/// Exact distance for spaces of at most six points. Every correspondence
/// contains one of the form graph(f) union graph(g)^T with f: X -> Y and
/// g: Y -> X, so branch and bound over (f, g) is exhaustive.
inline double gh_exact_small(const DistanceMatrix& d1, const DistanceMatrix& d2) {
  const std::size_t m = d1.size(), n = d2.size();
  if (m > 6 || n > 6) throw Error("space too large for exact search, use gh_upper_bound");
  if (m == 0 || n == 0) throw Error("empty metric space");

  // Initial bound: the full relation.
  Correspondence all;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) all.push_back({i, j});
  double best = distortion(d1, d2, all);

  Correspondence pairs;
  auto search = [&](auto&& self, std::size_t depth, double current) -> void {
    if (current >= best) return;
    if (depth == m + n) {
      best = current;
      return;
    }
    const bool forward = depth < m;
    const std::size_t slots = forward ? n : m;
    for (std::size_t choice = 0; choice < slots; ++choice) {
      const std::pair<std::size_t, std::size_t> p =
          forward ? std::pair{depth, choice} : std::pair{choice, depth - m};
      double worst = current;
      for (const auto& q : pairs) {
        worst = std::max(worst, std::abs(d1(p.first, q.first) - d2(p.second, q.second)));
        if (worst >= best) break;
      }
      if (worst >= best) continue;
      pairs.push_back(p);
      self(self, depth + 1, worst);
      pairs.pop_back();
    }
  };
  search(search, 0, 0.0);
  return 0.5 * best;
}

struct SliceSpec {
  double rho_lo = -12.0;  // clamped to the profile grid
  double rho_hi = 0.0;
  int n_rho = 64;
  int n_theta = 64;
  int neighbours = 8;  // 8, or 16 to add knight moves
};

/// Weighted graph approximating the slice of a radial metric: a
/// (rho, theta) grid with 8- or 16-neighbour connectivity and
/// theta-wraparound.
class SliceMetric {
  static constexpr std::array<std::pair<int, int>, 8> kSteps{
      {{0, 1}, {1, 0}, {1, 1}, {1, -1}, {1, 2}, {2, 1}, {1, -2}, {2, -1}}};

 public:
  SliceMetric(const PotentialProfile& p, const SliceSpec& spec) : spec_(spec), graph_(0) {
    p.require_positive();
    if (spec.n_rho < 2 || spec.n_theta < 5) throw Error("slice resolution too small");
    if (spec.neighbours != 8 && spec.neighbours != 16) throw Error("slice connectivity must be 8 or 16");
    const double lo = std::max(spec.rho_lo, p.grid.rho_min());
    const double hi = std::min(spec.rho_hi, p.grid.rho_max());
    if (!(lo < hi)) throw Error("empty slice range");
    const std::size_t nr = static_cast<std::size_t>(spec.n_rho);
    rho_.resize(nr);
    d1_.resize(nr);
    d2_.resize(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      rho_[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nr - 1);
      d1_[i] = interpolate(p.du, p.grid, rho_[i]);
      d2_[i] = interpolate(p.ddu, p.grid, rho_[i]);
    }
    dtheta_ = std::numbers::pi / spec.n_theta;
    graph_ = WeightedGraph(size());
    const int nt = spec.n_theta;
    for (std::size_t i = 0; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) {
        for (const auto& [di, dj] : kSteps) {
          if (spec.neighbours == 8 && (di == 2 || dj == 2 || dj == -2)) continue;
          const std::size_t ni = i + static_cast<std::size_t>(di);
          if (ni >= nr) continue;
          const int nj = ((j + dj) % nt + nt) % nt;
          graph_.add_edge(node(i, j), node(ni, nj), edge_length(i, ni, dj));
        }
      }
    }
  }

  std::size_t size() const { return rho_.size() * static_cast<std::size_t>(spec_.n_theta); }
  std::size_t node(std::size_t i, int j) const { return i * static_cast<std::size_t>(spec_.n_theta) + static_cast<std::size_t>(j); }
  double rho_of(std::size_t node) const { return rho_[node / static_cast<std::size_t>(spec_.n_theta)]; }
  double theta_of(std::size_t node) const { return dtheta_ * static_cast<double>(node % static_cast<std::size_t>(spec_.n_theta)); }
  std::size_t n_rho() const { return rho_.size(); }
  int n_theta() const { return spec_.n_theta; }
  const WeightedGraph& graph() const { return graph_; }
  const SliceSpec& spec() const { return spec_; }

 private:
  // Trapezoid rule for the line element along the straight parameter segment.
  double edge_length(std::size_t i, std::size_t ni, int dj) const {
    const double drho = rho_[ni] - rho_[i];
    const double dth = dtheta_ * dj;
    auto element = [&](std::size_t k) { return std::sqrt(0.25 * d2_[k] * drho * drho + d1_[k] * dth * dth); };
    return 0.5 * (element(i) + element(ni));
  }

  SliceSpec spec_;
  std::vector<double> rho_, d1_, d2_;
  double dtheta_ = 0.0;
  WeightedGraph graph_;
};

/// Pairwise graph distances between sample nodes of the slice.
inline DistanceMatrix slice_distances(const SliceMetric& slice, const std::vector<std::size_t>& samples) {
  DistanceMatrix d(samples.size());
  for (std::size_t a = 0; a < samples.size(); ++a) {
    if (samples[a] >= slice.size()) throw Error("sample node out of range");
    const auto dist = connected_shortest_paths(slice.graph(), samples[a]);
    for (std::size_t b = 0; b < samples.size(); ++b) d(a, b) = dist[samples[b]];
  }
  // Dijkstra is symmetric up to summation order.
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = a + 1; b < d.size(); ++b) d(a, b) = d(b, a) = 0.5 * (d(a, b) + d(b, a));
  return d;
}

inline DistanceMatrix slice_distances(const PotentialProfile& p, const SliceSpec& spec,
                                      const std::vector<std::size_t>& samples) {
  return slice_distances(SliceMetric(p, spec), samples);
}

/// Largest graph distance from any node of the outer circle or from the
/// given nodes to any node.
inline double slice_diameter(const SliceMetric& slice, const std::vector<std::size_t>& extra = {}) {
  std::vector<std::size_t> sources = extra;
  for (int j = 0; j < slice.n_theta(); ++j) sources.push_back(slice.node(slice.n_rho() - 1, j));
  double diameter = 0.0;
  for (std::size_t s : sources) {
    const auto dist = connected_shortest_paths(slice.graph(), s);
    diameter = std::max(diameter, *std::max_element(dist.begin(), dist.end()));
  }
  return diameter;
}

struct GhSettings {
  SliceSpec slice;
  int samples = 200;
  std::vector<double> deltas;  // tube radii; empty means 2^{-1}, ..., 2^{-17}
  double monotone_tolerance = 1e-12;

  std::vector<double> delta_list() const {
    if (!deltas.empty()) return deltas;
    std::vector<double> out;
    for (int k = 1; k <= 17; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
  }

  void validate() const {
    if (samples < 2) throw Error("gh.samples must be at least 2");
    for (double d : deltas) {
      if (!(d > 0.0)) throw Error("gh.deltas must be positive");
    }
  }
};

/// Distinct random slice nodes, sorted.
inline std::vector<std::size_t> sample_nodes(const SliceMetric& slice, int count, std::uint64_t seed) {
  if (count < 1 || static_cast<std::size_t>(count) > slice.size()) throw Error("invalid sample count");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(slice.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  // Partial Fisher-Yates with explicit modular draws keeps the choice
  // independent of the standard library's distribution implementation.
  for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng() % (all.size() - k));
    std::swap(all[k], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

struct GhRow {
  double t;
  double bound;
  double best_delta;
  double distortion_term;  // half distortion on samples outside the tube
  double tube_flow;
  double tube_ke;
};

struct ConvergenceReport {
  std::vector<GhRow> rows;
  double ke_diameter = 0.0;
  double t_monotone = std::numeric_limits<double>::quiet_NaN();  // bound nonincreasing from here on
  int samples = 0;
};

/// bound(t) = min over delta of [half distortion of the identity on samples
/// with rho >= log delta] + tube_diameter(snapshot, delta) + tube_diameter(KE, delta).
inline ConvergenceReport convergence_report(const std::vector<FlowState>& snapshots, const PotentialProfile& ke,
                                            const GhSettings& settings, std::uint64_t seed) {
  settings.validate();
  const auto deltas = settings.delta_list();
  const SliceMetric ke_slice(ke, settings.slice);
  const auto samples = sample_nodes(ke_slice, settings.samples, seed);
  const auto d_ke = slice_distances(ke_slice, samples);

  ConvergenceReport report;
  report.samples = settings.samples;
  report.ke_diameter = slice_diameter(ke_slice, samples);

  for (const auto& snap : snapshots) {
    const auto p = snap.potential();
    if (!(p.grid == ke.grid)) throw Error("snapshot and KE solution live on different grids");
    const auto d_t = slice_distances(SliceMetric(p, settings.slice), samples);
    GhRow best{snap.t, std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0, 0.0};
    for (double delta : deltas) {
      const double cut = std::log(delta);
      double worst = 0.0;
      for (std::size_t a = 0; a < samples.size(); ++a) {
        if (ke_slice.rho_of(samples[a]) < cut) continue;
        for (std::size_t b = 0; b < samples.size(); ++b) {
          if (ke_slice.rho_of(samples[b]) < cut) continue;
          worst = std::max(worst, std::abs(d_t(a, b) - d_ke(a, b)));
        }
      }
      const double tf = tube_diameter(p, delta);
      const double tk = tube_diameter(ke, delta);
      const double bound = 0.5 * worst + tf + tk;
      if (bound < best.bound) best = {snap.t, bound, delta, 0.5 * worst, tf, tk};
    }
    report.rows.push_back(best);
  }
  for (std::size_t k = report.rows.size(); k-- > 0;) {
    if (k + 1 < report.rows.size() &&
        report.rows[k].bound < report.rows[k + 1].bound - settings.monotone_tolerance) {
      break;
    }
    report.t_monotone = report.rows[k].t;
  }
  return report;
}

}  // namespace krf
