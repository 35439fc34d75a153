#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace krf {

/// Uniform grid in the log-radius rho = log r^2 on [rho_min, rho_max].
class RadialGrid {
 public:
  RadialGrid(double rho_min, double rho_max, std::size_t n) : rho_min_(rho_min), rho_max_(rho_max), n_(n) {
    if (!(rho_min < rho_max)) throw Error("grid requires rho_min < rho_max");
    if (n < 2) throw Error("grid needs at least two nodes");
    h_ = (rho_max - rho_min) / static_cast<double>(n - 1);
    nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) nodes_[i] = rho_min + h_ * static_cast<double>(i);
    nodes_.back() = rho_max;
  }

  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  /// s = r^2 = e^rho
  double s(std::size_t i) const { return std::exp(nodes_[i]); }
  double r(std::size_t i) const { return std::exp(0.5 * nodes_[i]); }

  /// Node range [first, last) that survives dropping `fraction` of the nodes
  /// at each end; sup-norm probes are taken over this range.
  std::pair<std::size_t, std::size_t> interior(double fraction) const {
    auto layer = static_cast<std::size_t>(fraction * static_cast<double>(n_));
    if (2 * layer >= n_) layer = (n_ - 1) / 2;
    return {layer, n_ - layer};
  }

  /// Same grid with 2n-1 nodes (every other node coincides with this one).
  RadialGrid refined() const { return RadialGrid(rho_min_, rho_max_, 2 * n_ - 1); }

  bool operator==(const RadialGrid& o) const {
    return rho_min_ == o.rho_min_ && rho_max_ == o.rho_max_ && n_ == o.n_;
  }

 private:
  double rho_min_;
  double rho_max_;
  std::size_t n_;
  double h_;
  std::vector<double> nodes_;
};

struct Derivatives {
  std::vector<double> first;
  std::vector<double> second;
};

/// Second-order first and second derivatives: centered in the interior,
/// one-sided three/four point stencils at the ends.
inline Derivatives differentiate(std::span<const double> f, const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (n < 5) throw Error("grid too coarse");
  if (f.size() != n) throw Error("value count does not match grid");
  const double h = grid.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  Derivatives d{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.first[i] = (f[i + 1] - f[i - 1]) * inv2h;
    d.second[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invh2;
  }
  d.first[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  d.second[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invh2;
  const std::size_t l = n - 1;
  d.first[l] = (3.0 * f[l] - 4.0 * f[l - 1] + f[l - 2]) * inv2h;
  d.second[l] = (2.0 * f[l] - 5.0 * f[l - 1] + 4.0 * f[l - 2] - f[l - 3]) * invh2;
  return d;
}

/// Linear interpolation of node values at an arbitrary rho inside the grid.
inline double interpolate(std::span<const double> f, const RadialGrid& grid, double rho) {
  if (rho <= grid.rho_min()) return f.front();
  if (rho >= grid.rho_max()) return f.back();
  const double x = (rho - grid.rho_min()) / grid.spacing();
  auto i = static_cast<std::size_t>(x);
  if (i + 1 >= grid.size()) i = grid.size() - 2;
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * f[i] + w * f[i + 1];
}

}  // namespace krf
