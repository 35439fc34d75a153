#pragma once

// Reduced parabolic complex Monge-Ampère equation
//
//   d phi / dt = log(psi' psi'' e^{-2 rho}) - e^{2 rho} - phi,
//   psi = e^{2 rho} + e^{-t} b0 rho + phi,   phi(rho, 0) = 0,
//
// with phi'(rho_min) = 0 and phi(rho_max) = 0, integrated by backward Euler
// and Newton on the tridiagonal linearization; and the stationary limit
// psi' psi'' e^{-2 rho} = e^{phi} e^{e^{2 rho}} solved directly.
//
// phi is stored as anchor + offset with offset[0] = 0. Near the curve psi''
// is ~1e-5 while phi is O(1); differencing offsets instead of phi keeps the
// second differences at full relative precision.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "ansatz.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "tridiagonal.hpp"

namespace krf {

struct StepperConfig {
  double dt = 1e-3;
  double t_end = 15.0;
  double newton_tol = 1e-10;
  int max_newton = 30;
  std::vector<double> snapshot_times = default_snapshot_times();
  /// Also emit snapshots at T - dt and T + dt around every snapshot time T,
  /// for centered time differences.
  bool bracket_snapshots = false;
  int max_halvings = 30;

  static std::vector<double> default_snapshot_times() {
    std::vector<double> t{0.0, 0.1, 0.5};
    for (int k = 1; k <= 15; ++k) t.push_back(k);
    return t;
  }

  void validate() const {
    if (!(dt > 0.0)) throw Error("stepper.dt must be positive");
    if (!(t_end >= 0.0)) throw Error("stepper.t_end must be nonnegative");
    if (!(newton_tol > 0.0)) throw Error("stepper.newton_tol must be positive");
    if (max_newton < 1) throw Error("stepper.max_newton must be at least 1");
  }
};

/// Solution of the reduced equation at one time.
struct FlowState {
  double t = 0.0;
  double anchor = 0.0;          // phi at rho_min
  std::vector<double> offset;   // phi - anchor, offset[0] = 0
  std::vector<double> phi_dot;  // right-hand side at this state
  std::shared_ptr<const ReferenceFamily> fam;
  bool reference_at_infinity = false;  // reference frozen at chi

  const RadialGrid& grid() const { return fam->grid(); }

  std::vector<double> phi() const {
    std::vector<double> p(offset);
    for (auto& x : p) x += anchor;
    return p;
  }

  double linear_coefficient() const { return reference_at_infinity ? 0.0 : fam->linear_coefficient(t); }

  /// Full potential psi = reference + phi with stencil derivatives.
  PotentialProfile potential() const;
};

namespace detail {

/// Grid data shared by the time stepper and the stationary solver.
class MongeAmpereOperator {
 public:
  explicit MongeAmpereOperator(const RadialGrid& grid) : grid_(grid), e2_(grid.size()) {
    for (std::size_t i = 0; i < grid.size(); ++i) e2_[i] = section_norm(grid[i]);
    auto d = differentiate(e2_, grid);
    de2_ = std::move(d.first);
    dde2_ = std::move(d.second);
  }

  const RadialGrid& grid() const { return grid_; }
  const std::vector<double>& e2() const { return e2_; }

  struct Evaluation {
    std::vector<double> p1;  // psi'
    std::vector<double> p2;  // psi''
    std::vector<double> f;   // right-hand side
    std::size_t bad_node = npos;
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  };

  Evaluation evaluate(double anchor, std::span<const double> offset, double linear) const {
    const std::size_t n = grid_.size();
    const auto d = differentiate(offset, grid_);
    Evaluation e{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      e.p1[i] = de2_[i] + linear + d.first[i];
      e.p2[i] = dde2_[i] + d.second[i];
      if (!(e.p1[i] > 0.0) || !(e.p2[i] > 0.0)) {
        if (e.bad_node == Evaluation::npos) e.bad_node = i;
        continue;
      }
      e.f[i] = std::log(e.p1[i]) + std::log(e.p2[i]) - 2.0 * grid_[i] - e2_[i] - (anchor + offset[i]);
    }
    return e;
  }

  PotentialProfile potential(double anchor, std::span<const double> offset, double linear) const {
    const std::size_t n = grid_.size();
    const auto d = differentiate(offset, grid_);
    PotentialProfile p{grid_, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      p.u[i] = e2_[i] + linear * grid_[i] + anchor + offset[i];
      p.du[i] = de2_[i] + linear + d.first[i];
      p.ddu[i] = dde2_[i] + d.second[i];
    }
    return p;
  }

 private:
  RadialGrid grid_;
  std::vector<double> e2_;
  std::vector<double> de2_;
  std::vector<double> dde2_;
};

struct NewtonOutcome {
  double anchor;
  std::vector<double> offset;
  double residual;
  int iterations;
  std::vector<double> damping;
};

/// Residual of
///   G_i = alpha (phi_i - phi_old_i) - beta f_i     interior rows,
///   G_0 = 4 q_1 - q_2                              (2h phi'(rho_min)),
///   G_{n-1} = phi(rho_max).
/// Returns infinity if the trial potential is not Kähler.
inline double newton_residual(const MongeAmpereOperator& op, double anchor, std::span<const double> offset,
                              double linear, double alpha, double beta, std::span<const double> phi_old,
                              std::vector<double>& g, MongeAmpereOperator::Evaluation& ev) {
  const std::size_t n = offset.size();
  ev = op.evaluate(anchor, offset, linear);
  if (ev.bad_node != MongeAmpereOperator::Evaluation::npos) return std::numeric_limits<double>::infinity();
  g.assign(n, 0.0);
  double res = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double phi = anchor + offset[i];
    g[i] = (alpha != 0.0 ? alpha * (phi - phi_old[i]) : 0.0) - beta * ev.f[i];
    res = std::max(res, std::abs(g[i]));
  }
  g[0] = 4.0 * offset[1] - offset[2];
  g[n - 1] = anchor + offset[n - 1];
  res = std::max({res, std::abs(g[0]), std::abs(g[n - 1])});
  return res;
}

inline NewtonOutcome newton_solve(const MongeAmpereOperator& op, double linear, double alpha, double beta,
                                  std::span<const double> phi_old, double anchor, std::vector<double> offset,
                                  double tol, int max_iterations, bool polish) {
  const std::size_t n = offset.size();
  const double h = op.grid().spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);

  std::vector<double> g;
  MongeAmpereOperator::Evaluation ev;
  double res = newton_residual(op, anchor, offset, linear, alpha, beta, phi_old, g, ev);
  if (!std::isfinite(res)) throw DegenerateMetric(ev.bad_node, op.grid()[ev.bad_node], "initial Newton iterate");

  NewtonOutcome out{anchor, std::move(offset), res, 0, {}};
  std::vector<double> trial_g;
  MongeAmpereOperator::Evaluation trial_ev;
  bool converged = res <= tol;
  for (int it = 0; it < max_iterations; ++it) {
    if (converged && !polish) break;
    if (res == 0.0) break;

    // Jacobian in the unknowns (anchor, q_1, ..., q_{n-1}).
    Tridiagonal t(n);
    std::vector<double> column0(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double a1 = inv2h / ev.p1[i];
      const double a2 = invh2 / ev.p2[i];
      t.diag[i] = alpha - beta * (-2.0 * a2 - 1.0);
      t.upper[i] = -beta * (a1 + a2);
      if (i == 1) {
        t.lower[0] = alpha + beta;  // q_0 is pinned; column 0 is the anchor
      } else {
        t.lower[i - 1] = -beta * (a2 - a1);
        column0[i] = alpha + beta;
      }
    }
    t.lower[n - 2] = 0.0;
    t.diag[n - 1] = 1.0;
    column0[n - 1] = 1.0;

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -g[i];
    // Row 0 is 4 q_1 - q_2: remove the q_2 entry with row 1.
    const double k = -1.0 / t.upper[1];
    t.diag[0] = -k * t.lower[0];
    t.upper[0] = 4.0 - k * t.diag[1];
    rhs[0] -= k * rhs[1];

    const auto delta = solve_bordered(t, column0, std::move(rhs));

    double lambda = 1.0;
    double trial_res = std::numeric_limits<double>::infinity();
    std::vector<double> trial_offset(n);
    double trial_anchor = out.anchor;
    while (lambda >= 1e-10) {
      trial_anchor = out.anchor + lambda * delta[0];
      trial_offset[0] = 0.0;
      for (std::size_t i = 1; i < n; ++i) trial_offset[i] = out.offset[i] + lambda * delta[i];
      trial_res = newton_residual(op, trial_anchor, trial_offset, linear, alpha, beta, phi_old, trial_g, trial_ev);
      if (trial_res <= (1.0 - 1e-4 * lambda) * res) break;
      lambda *= 0.5;
    }
    if (!(trial_res <= (1.0 - 1e-4 * lambda) * res)) {
      if (converged) break;  // rounding floor reached after convergence
      out.residual = res;
      throw NonConvergence("Newton line search stalled", res);
    }
    out.damping.push_back(lambda);
    out.iterations = it + 1;
    const double previous = res;
    out.anchor = trial_anchor;
    out.offset.swap(trial_offset);
    g.swap(trial_g);
    std::swap(ev, trial_ev);
    res = trial_res;
    if (converged && res > 0.5 * previous) break;  // polishing has stagnated
    converged = converged || res <= tol;
  }
  out.residual = res;
  if (!converged) throw NonConvergence("Newton did not converge in " + std::to_string(max_iterations) + " iterations", res);
  return out;
}

}  // namespace detail

inline PotentialProfile FlowState::potential() const {
  return detail::MongeAmpereOperator(grid()).potential(anchor, offset, linear_coefficient());
}

/// Right-hand side log(psi' psi'' e^{-2 rho}) - log Omega - phi at every node.
inline std::vector<double> rhs(const FlowState& state) {
  const detail::MongeAmpereOperator op(state.grid());
  auto ev = op.evaluate(state.anchor, state.offset, state.linear_coefficient());
  if (ev.bad_node != detail::MongeAmpereOperator::Evaluation::npos) {
    throw DegenerateMetric(ev.bad_node, state.grid()[ev.bad_node], "time " + std::to_string(state.t));
  }
  return std::move(ev.f);
}

/// Initial state phi = 0 at t = 0.
inline FlowState initial_state(std::shared_ptr<const ReferenceFamily> fam) {
  FlowState s;
  s.fam = std::move(fam);
  s.offset.assign(s.fam->grid().size(), 0.0);
  s.phi_dot = rhs(s);
  return s;
}

struct StepReport {
  double residual = 0.0;
  int iterations = 0;
};

/// One backward-Euler step: phi_new - phi - dt rhs(phi_new, t + dt) = 0.
inline FlowState step_implicit(const FlowState& state, double dt, const StepperConfig& cfg = {},
                               StepReport* report = nullptr) {
  if (dt == 0.0) return state;
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const detail::MongeAmpereOperator op(state.grid());
  FlowState next = state;
  next.t = state.t + dt;
  const auto phi_old = state.phi();
  auto sol = detail::newton_solve(op, next.linear_coefficient(), 1.0, dt, phi_old, state.anchor, state.offset,
                                  cfg.newton_tol, cfg.max_newton, false);
  next.anchor = sol.anchor;
  next.offset = std::move(sol.offset);
  next.phi_dot = rhs(next);
  if (report) *report = {sol.residual, sol.iterations};
  return next;
}

struct RunStats {
  std::size_t steps = 0;
  std::size_t halvings = 0;
  int max_newton_iterations = 0;
  double max_residual = 0.0;
};

struct FlowRun {
  std::vector<FlowState> snapshots;
  RunStats stats;
};

/// Snapshot times actually emitted: requested times (plus brackets) within
/// [0, t_end], always including 0 and t_end, sorted and deduplicated.
inline std::vector<double> snapshot_schedule(const StepperConfig& cfg) {
  std::vector<double> times{0.0, cfg.t_end};
  for (double t : cfg.snapshot_times) {
    if (t < 0.0 || t > cfg.t_end) continue;
    times.push_back(t);
    if (cfg.bracket_snapshots && t > 0.0 && t + cfg.dt <= cfg.t_end + 1e-12) {
      times.push_back(t - cfg.dt);
      times.push_back(t + cfg.dt);
    }
  }
  std::sort(times.begin(), times.end());
  std::vector<double> unique;
  for (double t : times) {
    if (unique.empty() || t - unique.back() > 1e-9) unique.push_back(std::min(t, cfg.t_end));
  }
  return unique;
}

/// Integrates from phi = 0 to t_end; halves dt on Newton failure.
inline FlowRun run_flow(const StepperConfig& cfg, const ModelConfig& model) {
  cfg.validate();
  auto fam = std::make_shared<const ReferenceFamily>(model);
  FlowRun run;
  FlowState state = initial_state(fam);
  const auto targets = snapshot_schedule(cfg);
  std::size_t next = 0;
  if (targets.front() == 0.0) {
    run.snapshots.push_back(state);
    ++next;
  }
  double dt_try = cfg.dt;
  int halvings_in_row = 0;
  while (next < targets.size()) {
    const double target = targets[next];
    double h = std::min(dt_try, target - state.t);
    if (target - state.t - h < 1e-9 * cfg.dt) h = target - state.t;
    StepReport report;
    try {
      state = step_implicit(state, h, cfg, &report);
    } catch (const Error&) {
      if (++halvings_in_row > cfg.max_halvings || h * 0.5 < 1e-12) throw;
      dt_try = 0.5 * h;
      ++run.stats.halvings;
      continue;
    }
    halvings_in_row = 0;
    ++run.stats.steps;
    run.stats.max_newton_iterations = std::max(run.stats.max_newton_iterations, report.iterations);
    run.stats.max_residual = std::max(run.stats.max_residual, report.residual);
    dt_try = std::min(cfg.dt, 2.0 * dt_try);
    if (std::abs(state.t - target) <= 1e-9 * std::max(1.0, target)) {
      state.t = target;
      run.snapshots.push_back(state);
      ++next;
    }
  }
  return run;
}

/// The snapshots whose times match `times` (to 1e-9), in run order.
inline std::vector<FlowState> select_times(const std::vector<FlowState>& snapshots, const std::vector<double>& times) {
  std::vector<FlowState> out;
  for (const auto& s : snapshots) {
    for (double t : times) {
      if (std::abs(s.t - t) <= 1e-9) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

/// The snapshot at time t; throws if absent.
inline const FlowState& snapshot_at(const std::vector<FlowState>& snapshots, double t) {
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9) return s;
  }
  throw Error("no snapshot at t = " + std::to_string(t));
}

/// Stationary solution psi_KE with (chi + ddbar phi)^2 = e^{phi} Omega.
struct KeSolution {
  PotentialProfile psi;
  std::vector<double> phi;
  double anchor = 0.0;
  std::vector<double> offset;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> damping;  // accepted step length per iteration

  /// The solution as a state of the flow with reference frozen at chi.
  FlowState as_state(std::shared_ptr<const ReferenceFamily> fam) const {
    FlowState s;
    s.t = std::numeric_limits<double>::infinity();
    s.fam = std::move(fam);
    s.anchor = anchor;
    s.offset = offset;
    s.reference_at_infinity = true;
    s.phi_dot = krf::rhs(s);
    return s;
  }
};

/// Damped Newton from phi = 0; iterates past newton_tol down to the rounding
/// floor so that curvature computed from the solution is clean.
inline KeSolution solve_ke_newton(const ModelConfig& model, double newton_tol = 1e-10, int max_newton = 100) {
  model.validate();
  const auto grid = model.grid();
  const detail::MongeAmpereOperator op(grid);
  std::vector<double> none;
  auto sol = detail::newton_solve(op, 0.0, 0.0, 1.0, none, 0.0, std::vector<double>(grid.size(), 0.0), newton_tol,
                                  max_newton, true);
  std::vector<double> phi = sol.offset;
  for (auto& x : phi) x += sol.anchor;
  return {op.potential(sol.anchor, sol.offset, 0.0), std::move(phi), sol.anchor, std::move(sol.offset), sol.residual,
          sol.iterations, std::move(sol.damping)};
}

}  // namespace krf
