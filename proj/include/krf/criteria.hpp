#pragma once

// The acceptance checks, shared by the `report` subcommand and the
// acceptance test binary. Each check returns measured values next to the
// pinned tolerance it was judged against.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ambient_oracle.hpp"
#include "ansatz.hpp"
#include "conical.hpp"
#include "config.hpp"
#include "flow.hpp"
#include "gh.hpp"
#include "probes.hpp"

namespace krf {

namespace tolerance {
inline constexpr double oracle_relative = 1e-5;
inline constexpr double oracle_seconds = 10.0;
inline constexpr double ke_residual = 1e-10;
inline constexpr double ke_curvature = 1e-3;
inline constexpr double ke_seconds = 5.0;
inline constexpr double flow_gap = 1e-3;
inline constexpr double flow_seconds = 60.0;
inline constexpr double area_relative = 1e-6;
inline constexpr double uniformity_factor = 2.0;
inline constexpr double trace_residual = 0.05;
inline constexpr double flatness = 1e-6;
inline constexpr double path_quadrature = 1e-8;
inline constexpr double exponent_band = 0.02;
inline constexpr double curve_relative = 1e-6;
inline constexpr double gh_fraction = 0.02;
inline constexpr double gh_seconds = 180.0;
inline constexpr double order_ratio_low = 3.0;
inline constexpr double order_ratio_high = 5.0;
}  // namespace tolerance

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> values;
  std::string error;  // set when the check threw

  void record(std::string key, double value) { values.emplace_back(std::move(key), value); }
};

/// Snapshot times used by the checks: 0, 0.1, ..., 1, 1.5, ..., 15.
inline std::vector<double> acceptance_times() {
  std::vector<double> t;
  for (int k = 0; k <= 10; ++k) t.push_back(0.1 * k);
  for (int k = 3; k <= 30; ++k) t.push_back(0.5 * k);
  return t;
}

class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  std::vector<CriterionResult> run_all() {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 12; ++id) out.push_back(run(id));
    return out;
  }

  CriterionResult run(int id) {
    CriterionResult r;
    r.id = id;
    const auto start = std::chrono::steady_clock::now();
    try {
      switch (id) {
        case 1: reduction_oracle(r); break;
        case 2: ke_solver(r); break;
        case 3: flow_to_ke(r); break;
        case 4: area_decay(r); break;
        case 5: uniform_estimates(r); break;
        case 6: trace_inequality(r); break;
        case 7: conical_flatness(r); break;
        case 8: diameter_scaling(r); break;
        case 9: distance_scaling_check(r); break;
        case 10: curve_collapse(r); break;
        case 11: gh_convergence(r); break;
        case 12: order_of_accuracy(r); break;
        default: throw Error("no criterion " + std::to_string(id));
      }
    } catch (const std::exception& e) {
      r.pass = false;
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

  const FlowRun& flow_run() {
    if (!run_) {
      const auto start = std::chrono::steady_clock::now();
      StepperConfig s = cfg_.stepper;
      s.snapshot_times = acceptance_times();
      s.t_end = 15.0 + s.dt;  // room for the bracket after t = 15
      s.bracket_snapshots = true;
      run_ = run_flow(s, cfg_.model);
      flow_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return *run_;
  }

  const KeSolution& ke() {
    if (!ke_) {
      const auto start = std::chrono::steady_clock::now();
      ke_ = solve_ke_newton(cfg_.model, cfg_.stepper.newton_tol);
      ke_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return *ke_;
  }

  const EstimateReport& estimates() {
    if (!report_) report_ = estimate_report(flow_run().snapshots, cfg_.probes, cfg_.tube_deltas);
    return *report_;
  }

  /// Snapshots at the acceptance times only, without brackets.
  std::vector<FlowState> primary_snapshots() { return select_times(flow_run().snapshots, acceptance_times()); }

 private:
  struct Quadratic {
    double a, b, c;
    template <typename T>
    T operator()(const T& rho) const {
      return a * krf::exp(2 * rho) + b * krf::exp(rho) + c * rho;
    }
  };
  struct TestFunction {
    template <typename T>
    T operator()(const T& rho) const {
      return krf::sin(rho) + 0.3 * rho * rho;
    }
  };

  static double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

  void reduction_oracle(CriterionResult& r) {
    r.name = "reduction matches ambient finite differences";
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> coeff(0.1, 1.1), rho_dist(-3.0, 0.0);
    std::normal_distribution<double> normal;
    double eig = 0, vnorm = 0, density = 0, lap = 0, curv = 0;
    for (int k = 0; k < 20; ++k) {
      const Quadratic pot{coeff(rng), coeff(rng), coeff(rng)};
      const double rho = rho_dist(rng);
      std::array<double, 4> dir;
      double len = 0.0;
      for (auto& x : dir) {
        x = normal(rng);
        len += x * x;
      }
      const double scale = std::exp(0.5 * rho) / std::sqrt(len);
      const Point4 x{Real(scale * dir[0]), Real(scale * dir[1]), Real(scale * dir[2]), Real(scale * dir[3])};
      const auto red = reduce_at(pot, rho);
      const auto h = ambient_hessian_oracle(pot, x);
      const auto ev = h.eigenvalues();
      eig = std::max({eig, rel(double(ev[0]), std::min(red.lam_rad, red.lam_tan)),
                      rel(double(ev[1]), std::max(red.lam_rad, red.lam_tan))});
      const std::complex<Real> z1(x[0], x[1]), z2(x[2], x[3]);
      const Real v2 = h.a11 * std::norm(z1) + h.a22 * std::norm(z2) + 2 * (z1 * std::conj(z2) * h.a12).real();
      vnorm = std::max(vnorm, rel(double(v2), red.vnorm2));
      density = std::max(density, rel(double(h.det()), red.det_rel));
      lap = std::max(lap, rel(double(ambient_laplacian(pot, TestFunction{}, x)), laplacian_at(pot, TestFunction{}, rho)));
      curv = std::max(curv, rel(double(ambient_scalar_curvature(pot, x)), red.scalar_curvature));
    }
    r.record("eigenvalue_rel_err", eig);
    r.record("vnorm2_rel_err", vnorm);
    r.record("density_rel_err", density);
    r.record("laplacian_rel_err", lap);
    r.record("curvature_rel_err", curv);
    r.pass = std::max({eig, vnorm, density, lap, curv}) <= tolerance::oracle_relative;
  }

  void ke_solver(CriterionResult& r) {
    r.name = "KE Newton solve";
    const auto& sol = ke();
    const auto R = scalar_curvature(sol.psi);
    const auto [first, last] = sol.psi.grid.interior(cfg_.probes.exclusion);
    double worst = 0.0;
    for (std::size_t i = first; i < last; ++i) worst = std::max(worst, std::abs(R[i] + 2.0));
    r.record("residual", sol.residual);
    r.record("iterations", sol.iterations);
    r.record("max_abs_R_plus_2", worst);
    r.record("solve_seconds", ke_seconds_);
    r.pass = sol.residual <= tolerance::ke_residual && worst <= tolerance::ke_curvature &&
             ke_seconds_ < tolerance::ke_seconds;
  }

  double gap_to_ke(double t) {
    const auto phi = snapshot_at(flow_run().snapshots, t).phi();
    double gap = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) gap = std::max(gap, std::abs(phi[i] - ke().phi[i]));
    return gap;
  }

  void flow_to_ke(CriterionResult& r) {
    r.name = "flow converges to KE";
    const auto& run = flow_run();
    const double g10 = gap_to_ke(10.0), g15 = gap_to_ke(15.0);
    r.record("gap_t10", g10);
    r.record("gap_t15", g15);
    r.record("flow_seconds", flow_seconds_);
    r.record("steps", double(run.stats.steps));
    r.record("halvings", double(run.stats.halvings));
    r.pass = g15 <= tolerance::flow_gap && g10 > g15 && flow_seconds_ < tolerance::flow_seconds;
  }

  void area_decay(CriterionResult& r) {
    r.name = "curve area decays as exp(-t) b0";
    double worst = 0.0;
    for (const auto& s : flow_run().snapshots) {
      worst = std::max(worst, std::abs(area_of_curve(s) - std::exp(-s.t) * cfg_.model.b0) / cfg_.model.b0);
    }
    r.record("max_rel_err", worst);
    r.record("snapshots", double(flow_run().snapshots.size()));
    r.pass = worst <= tolerance::area_relative;
  }

  void uniform_estimates(CriterionResult& r) {
    r.name = "estimate constants uniform in time";
    const auto& rep = estimates();
    const std::vector<std::pair<std::string, double EstimateRow::*>> probes{
        {"K1", &EstimateRow::K1},           {"K2b", &EstimateRow::K2b},
        {"K3", &EstimateRow::K3},           {"K_barrier", &EstimateRow::K_barrier},
        {"sup_phi", &EstimateRow::sup_phi}, {"sup_phidot", &EstimateRow::sup_phidot},
        {"sup_R", &EstimateRow::sup_R}};
    r.pass = true;
    for (const auto& [name, member] : probes) {
      const auto u = uniformity(rep, [member](const EstimateRow& row) { return row.*member; }, 1.0,
                                tolerance::uniformity_factor);
      r.record(name + "_ratio", u.max_all / u.max_early);
      r.pass = r.pass && u.pass;
    }
  }

  void trace_inequality(CriterionResult& r) {
    r.name = "trace inequality residual";
    double worst = -std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (const auto& row : estimates().rows) {
      if (std::isnan(row.schwarz_max) || row.t < 0.1 - 1e-9 || row.t > 15.0 + 1e-9) continue;
      worst = std::max(worst, row.schwarz_max);
      ++evaluated;
    }
    const auto conv = trace_residual_convergence(cfg_.model, cfg_.probes, {1.0, 5.0, 10.0}, cfg_.stepper.dt, 3);
    r.record("max_residual", worst);
    r.record("times_evaluated", evaluated);
    for (std::size_t k = 0; k < conv.dts.size(); ++k) {
      r.record("max_residual_dt" + std::to_string(k), conv.max_residual[k]);
    }
    for (std::size_t k = 0; k < conv.defect.size(); ++k) r.record("defect_" + std::to_string(k), conv.defect[k]);
    const bool shrinking = conv.defect.size() == 2 && conv.defect[1] < conv.defect[0];
    r.pass = evaluated > 0 && worst <= tolerance::trace_residual && shrinking;
  }

  void conical_flatness(CriterionResult& r) {
    r.name = "conical metric flat, path lengths exact";
    const auto flat = con_flatness_check(cfg_.conical.flatness_samples, cfg_.seed);
    std::mt19937_64 rng(cfg_.seed + 1);
    std::uniform_real_distribution<double> mod(0.01, 1.0), arg(0.0, 2.0 * std::numbers::pi);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const auto u0 = std::polar(mod(rng), arg(rng));
      const auto v0 = std::polar(mod(rng), arg(rng));
      worst = std::max(worst, rel(con_path_length_quadrature(u0, v0), con_path_length(u0, v0)));
    }
    r.record("max_curvature", flat.max_curvature);
    r.record("samples_evaluated", flat.evaluated);
    r.record("samples_skipped", flat.skipped);
    r.record("path_rel_err", worst);
    r.pass = flat.evaluated > 0 && flat.max_curvature <= tolerance::flatness && worst <= tolerance::path_quadrature;
  }

  void diameter_scaling(CriterionResult& r) {
    r.name = "conical ball diameter scales as delta^(1/3)";
    std::vector<double> x, bound, graph;
    double ratio_at_2m5 = std::numeric_limits<double>::quiet_NaN();
    for (double d : cfg_.conical.delta_list()) {
      const auto b = con_ball_diameter(d, cfg_.conical.graph_cells);
      x.push_back(std::log(d));
      bound.push_back(std::log(b.upper_bound));
      graph.push_back(std::log(b.graph));
      if (d == std::ldexp(1.0, -5)) ratio_at_2m5 = b.graph / b.upper_bound;
    }
    const double slope = fit_slope(x, bound);
    const double graph_slope = fit_slope(x, graph);
    r.record("slope", slope);
    r.record("graph_slope", graph_slope);
    r.record("graph_over_bound_2^-5", ratio_at_2m5);
    r.pass = std::abs(slope - 1.0 / 3.0) <= tolerance::exponent_band &&
             std::abs(graph_slope - 1.0 / 3.0) <= tolerance::exponent_band &&
             (std::isnan(ratio_at_2m5) || (ratio_at_2m5 >= 0.5 && ratio_at_2m5 <= 1.0));
  }

  void distance_scaling_check(CriterionResult& r) {
    r.name = "distance to the curve scales at least as d^(1/3)";
    const auto ds = distance_scaling(flow_run().snapshots);
    r.record("exponent", ds.exponent);
    r.record("constant", ds.constant);
    r.pass = ds.exponent >= 1.0 / 3.0 - tolerance::exponent_band;
  }

  void curve_collapse(CriterionResult& r) {
    r.name = "curve and tube diameters collapse";
    const double b0 = cfg_.model.b0;
    const double rho_min = cfg_.model.rho_min;
    double worst_rel = 0.0, worst_limit = 0.0;
    for (const auto& s : flow_run().snapshots) {
      const double cd = curve_diameter(s);
      const double expected = 0.5 * std::numbers::pi * std::sqrt(std::exp(-s.t) * b0 + 2.0 * section_norm(rho_min));
      worst_rel = std::max(worst_rel, rel(cd, expected));
      worst_limit = std::max(worst_limit, std::abs(cd - 0.5 * std::numbers::pi * std::sqrt(std::exp(-s.t) * b0)));
    }
    const double limit_bound = 0.5 * std::numbers::pi * std::sqrt(2.0) * std::exp(rho_min);
    bool monotone = true;
    double worst_increase = 0.0;
    const auto& rows = estimates().rows;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (rows[k - 1].t < 5.0 - 1e-9) continue;
      for (std::size_t d = 0; d < rows[k].diam_tube.size(); ++d) {
        const double inc = rows[k].diam_tube[d] - rows[k - 1].diam_tube[d];
        worst_increase = std::max(worst_increase, inc);
        if (inc > 1e-12 * rows[k - 1].diam_tube[d]) monotone = false;
      }
    }
    r.record("curve_rel_err", worst_rel);
    r.record("curve_minus_limit", worst_limit);
    r.record("curve_minus_limit_bound", limit_bound);
    r.record("tube_max_increase_after_t5", worst_increase);
    r.pass = worst_rel <= tolerance::curve_relative && worst_limit <= limit_bound && monotone;
  }

  void gh_convergence(CriterionResult& r) {
    r.name = "Gromov-Hausdorff bound to the KE slice";
    const auto rep = convergence_report(primary_snapshots(), ke().psi, cfg_.gh, cfg_.seed);
    auto bound_at = [&](double t) {
      for (const auto& row : rep.rows) {
        if (std::abs(row.t - t) <= 1e-9) return row.bound;
      }
      throw Error("no GH row at t = " + std::to_string(t));
    };
    const double b10 = bound_at(10.0), b15 = bound_at(15.0);

    std::mt19937_64 rng(cfg_.seed + 2);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::uniform_int_distribution<int> size(3, 5);
    auto random_space = [&](int m) {
      std::vector<std::complex<double>> pts(static_cast<std::size_t>(m));
      for (auto& p : pts) p = {coord(rng), coord(rng)};
      DistanceMatrix d(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) d(i, j) = std::abs(pts[i] - pts[j]);
      return d;
    };
    int violations = 0, nonzero_self = 0, asymmetric = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = random_space(size(rng));
      const auto b = random_space(size(rng));
      Correspondence corr;
      for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        corr.push_back({std::min(i, a.size() - 1), std::min(i, b.size() - 1)});
      }
      std::uniform_int_distribution<std::size_t> ia(0, a.size() - 1), ib(0, b.size() - 1);
      for (int extra = 0; extra < 3; ++extra) corr.push_back({ia(rng), ib(rng)});
      std::shuffle(corr.begin(), corr.end(), rng);
      const double exact = gh_exact_small(a, b);
      const double upper = gh_upper_bound(a, b, corr);
      min_gap = std::min(min_gap, upper - exact);
      if (upper < exact - 1e-12) ++violations;
      if (gh_exact_small(a, a) != 0.0) ++nonzero_self;
      if (std::abs(gh_exact_small(b, a) - exact) > 1e-15) ++asymmetric;
    }
    r.record("bound_t10", b10);
    r.record("bound_t15", b15);
    r.record("ke_slice_diameter", rep.ke_diameter);
    r.record("bound_t15_over_diameter", b15 / rep.ke_diameter);
    r.record("t_monotone", rep.t_monotone);
    r.record("upper_minus_exact_min", min_gap);
    r.record("upper_below_exact", violations);
    r.record("self_distance_nonzero", nonzero_self);
    r.record("asymmetric", asymmetric);
    r.pass = b15 <= tolerance::gh_fraction * rep.ke_diameter && b10 > b15 && violations == 0 && nonzero_self == 0 &&
             asymmetric == 0;
  }

  void order_of_accuracy(CriterionResult& r) {
    r.name = "second-order spatial convergence";
    StepperConfig s = cfg_.stepper;
    s.snapshot_times = {};
    s.bracket_snapshots = false;
    std::vector<std::vector<double>> phis;
    std::vector<std::size_t> sizes;
    for (std::size_t n = (cfg_.model.n + 1) / 2; n <= 2 * cfg_.model.n - 1; n = 2 * n - 1) {
      ModelConfig m = cfg_.model;
      m.n = n;
      sizes.push_back(n);
      phis.push_back(run_flow(s, m).snapshots.back().phi());
    }
    // Differences of successive refinements on the coarse nodes.
    std::vector<double> diffs;
    for (std::size_t k = 0; k + 1 < phis.size(); ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < phis[k].size(); ++i) d = std::max(d, std::abs(phis[k][i] - phis[k + 1][2 * i]));
      diffs.push_back(d);
    }
    const double ratio = diffs[0] / diffs[1];
    r.record("n_coarse", double(sizes.front()));
    r.record("diff_coarse", diffs[0]);
    r.record("diff_fine", diffs[1]);
    r.record("ratio", ratio);
    r.pass = ratio >= tolerance::order_ratio_low && ratio <= tolerance::order_ratio_high;
  }

  RunConfig cfg_;
  std::optional<FlowRun> run_;
  std::optional<KeSolution> ke_;
  std::optional<EstimateReport> report_;
  double flow_seconds_ = 0.0;
  double ke_seconds_ = 0.0;
};

}  // namespace krf
