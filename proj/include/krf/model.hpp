#pragma once

// Local model of a contracted (-2)-curve: the resolution of C^2/Z_2 seen
// through radial potentials on the punctured ball.
//
//   chi     = ddbar e^{2 rho}              pullback of the flat metric under
//                                          (z1, z2) -> (z1^2, z2^2, z1 z2)
//   omega_0 = chi + b0 ddbar rho           smooth Kähler on the resolution,
//                                          curve area proportional to b0
//   Omega   = e^{e^{2 rho}} (flat volume)  so that ddbar log Omega = chi
//
// and the reference family omega_hat(t) = chi + e^{-t}(omega_0 - chi).

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "ansatz.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "jet.hpp"

namespace krf {

struct ModelConfig {
  double b0 = 1.0;
  double rho_min = -12.0;
  double rho_max = 0.0;
  std::size_t n = 513;

  void validate() const {
    if (!(b0 > 0.0)) throw Error("model.b0 must be positive");
    if (!(rho_min <= -8.0)) throw Error("model.rho_min must be <= -8 to resolve the curve region");
    if (!(rho_min < rho_max)) throw Error("model.rho_min must be below model.rho_max");
    if (n < 5) throw Error("grid too coarse");
  }

  RadialGrid grid() const { return RadialGrid(rho_min, rho_max, n); }
};

/// Closed-form potential e^{2 rho} + c rho.
struct ReferencePotential {
  double linear = 0.0;

  template <typename T>
  T operator()(const T& rho) const {
    return krf::exp(2.0 * rho) + linear * rho;
  }
};

/// |sigma|_h^2 = r^4 for the defining section of the curve.
inline double section_norm(double rho) { return std::exp(2.0 * rho); }

class ReferenceFamily {
 public:
  /// b0 = 0 is accepted here (omega_0 = chi) so that degenerate data can be
  /// inspected; ModelConfig::validate rejects it for runs.
  ReferenceFamily(RadialGrid grid, double b0)
      : grid_(std::move(grid)),
        b0_(b0),
        u_chi_(PotentialProfile::from_closed_form(grid_, ReferencePotential{0.0})),
        u_0_(PotentialProfile::from_closed_form(grid_, ReferencePotential{b0})) {
    if (b0 < 0.0) throw Error("b0 must be nonnegative");
    log_omega_density_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) log_omega_density_[i] = section_norm(grid_[i]);
  }

  explicit ReferenceFamily(const ModelConfig& model) : ReferenceFamily((model.validate(), model.grid()), model.b0) {}

  const RadialGrid& grid() const { return grid_; }
  double b0() const { return b0_; }
  const PotentialProfile& u_chi() const { return u_chi_; }
  const PotentialProfile& u_0() const { return u_0_; }
  /// log(Omega / flat volume) = e^{2 rho}.
  const std::vector<double>& log_omega_density() const { return log_omega_density_; }

  /// Coefficient of rho in the reference potential at time t.
  double linear_coefficient(double t) const { return std::exp(-t) * b0_; }

 private:
  RadialGrid grid_;
  double b0_;
  PotentialProfile u_chi_;
  PotentialProfile u_0_;
  std::vector<double> log_omega_density_;
};

/// Potential of omega_hat(t) = chi + e^{-t}(omega_0 - chi), exact derivatives.
inline PotentialProfile reference_potential(const ReferenceFamily& fam, double t) {
  if (!(t >= 0.0)) throw Error("reference time must be nonnegative");
  return PotentialProfile::from_closed_form(fam.grid(), ReferencePotential{fam.linear_coefficient(t)});
}

/// Empirical constants for
///   C^{-1} r^2 omega_Eucl <= omega_0 <= (C / r^2) omega_Eucl,
///   r^4 / C <= |V|^2_{omega_0} <= C r^4.
struct ComparisonBounds {
  double c_low;            // sup of r^2 / eigenvalue
  double c_high;           // sup of r^2 * eigenvalue
  double vnorm_ratio_min;  // min of |V|^2 / r^4
  double vnorm_ratio_max;
  double curve_coefficient;  // tangential chart component of omega_0 on the curve
};

inline ComparisonBounds check_comparison_bounds(const ReferenceFamily& fam) {
  const auto& grid = fam.grid();
  const auto m = metric_from_potential(fam.u_0());
  ComparisonBounds b{0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid.s(i);
    for (double lam : {m.lam_rad[i], m.lam_tan[i]}) {
      b.c_low = std::max(b.c_low, s / lam);
      b.c_high = std::max(b.c_high, s * lam);
    }
    const double ratio = m.vnorm2[i] / section_norm(grid[i]);
    b.vnorm_ratio_min = std::min(b.vnorm_ratio_min, ratio);
    b.vnorm_ratio_max = std::max(b.vnorm_ratio_max, ratio);
  }
  if (!std::isfinite(b.c_low) || !std::isfinite(b.c_high)) {
    throw Error("comparison bound C^{-1} r^2 omega_Eucl <= omega_0 <= C r^{-2} omega_Eucl has no finite constant");
  }
  if (!(b.vnorm_ratio_min > 0.0) || !std::isfinite(b.vnorm_ratio_max)) {
    throw Error("comparison bound r^4/C <= |V|^2 <= C r^4 violated");
  }
  // In the chart u = z1^2, v = z2/z1 the component g(d_v, d_vbar) on the
  // curve u = 0, v = 0 is the rho -> -infinity limit of u_0' minus the
  // vanishing chi part; omega_0 extends as a metric across the curve only if
  // it is positive.
  b.curve_coefficient = fam.u_0().du.front() - 2.0 * section_norm(grid.rho_min());
  if (!(b.curve_coefficient > 1e3 * std::numeric_limits<double>::epsilon() * fam.u_0().du.front())) {
    throw Error("omega_0 degenerates on the exceptional curve at node 0: chart lower bound g(d_v, d_vbar) >= 1/C fails");
  }
  return b;
}

}  // namespace krf
