#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include <krf/ansatz.hpp>
#include <krf/flow.hpp>
#include <krf/tridiagonal.hpp>

using namespace krf;

namespace {
std::shared_ptr<const ReferenceFamily> default_family() {
  static const auto fam = std::make_shared<const ReferenceFamily>(ModelConfig{});
  return fam;
}

const KeSolution& default_ke() {
  static const KeSolution ke = solve_ke_newton(ModelConfig{});
  return ke;
}

const FlowRun& default_run() {
  static const FlowRun run = run_flow(StepperConfig{}, ModelConfig{});
  return run;
}
}  // namespace

TEST(Tridiagonal, MatchesDenseSolveWithPivoting) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t n = 7;
  Tridiagonal t(n);
  for (auto& x : t.lower) x = u(rng);
  for (auto& x : t.upper) x = u(rng);
  for (auto& x : t.diag) x = 0.01 * u(rng);  // weak diagonal forces pivoting
  std::vector<double> b(n);
  for (auto& x : b) x = u(rng);
  const auto x = solve_tridiagonal(t, b);
  for (std::size_t i = 0; i < n; ++i) {
    double ax = t.diag[i] * x[i];
    if (i > 0) ax += t.lower[i - 1] * x[i - 1];
    if (i + 1 < n) ax += t.upper[i] * x[i + 1];
    EXPECT_NEAR(ax, b[i], 1e-12);
  }
}

TEST(Tridiagonal, BorderedSolve) {
  const std::size_t n = 6;
  Tridiagonal t(n);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = 4.0 + i;
  for (auto& x : t.lower) x = 1.0;
  for (auto& x : t.upper) x = -1.0;
  const std::vector<double> col{0.5, 1, 2, 3, 4, 5}, b{1, 2, 3, 4, 5, 6};
  const auto x = solve_bordered(t, col, b);
  for (std::size_t i = 0; i < n; ++i) {
    double ax = t.diag[i] * x[i] + col[i] * x[0];
    if (i > 0) ax += t.lower[i - 1] * x[i - 1];
    if (i + 1 < n) ax += t.upper[i] * x[i + 1];
    EXPECT_NEAR(ax, b[i], 1e-12);
  }
}

TEST(Rhs, InitialValueAtOuterBoundary) {
  const auto s = initial_state(default_family());
  const auto f = rhs(s);
  // One-sided stencils for e^{2 rho} at the boundary carry an O(h^2) error.
  const double h = s.grid().spacing();
  EXPECT_NEAR(f.back(), std::log(12.0) - 1.0, 10.0 * h * h);
}

TEST(Rhs, ConstantShiftLowersRhsByTheShift) {
  auto s = initial_state(default_family());
  const auto before = rhs(s);
  s.anchor += 0.37;
  const auto after = rhs(s);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(before[i] - after[i], 0.37, 1e-12);
}

TEST(Rhs, DegenerateStateNamesNodeAndTime) {
  auto s = initial_state(default_family());
  s.t = 2.0;
  s.offset[300] -= 5.0;  // kink makes psi'' negative
  try {
    rhs(s);
    FAIL();
  } catch (const DegenerateMetric& e) {
    EXPECT_NE(std::string(e.what()).find("time 2"), std::string::npos);
  }
}

TEST(StepImplicit, ZeroStepIsIdentity) {
  const auto s = initial_state(default_family());
  const auto same = step_implicit(s, 0.0);
  EXPECT_EQ(same.t, s.t);
  EXPECT_EQ(same.offset, s.offset);
  EXPECT_EQ(same.anchor, s.anchor);
}

TEST(StepImplicit, TinyStepAgreesWithExplicitEulerWhereResolved) {
  // Backward and forward Euler differ by about dt / (psi'' h^2) relative to
  // the step, the ratio of dt to the local diffusion time.
  const auto s = initial_state(default_family());
  const double dt = 1e-7;
  StepperConfig cfg;
  cfg.newton_tol = 1e-14;
  const auto next = step_implicit(s, dt, cfg);
  const auto phi = next.phi();
  const auto p = s.potential();
  const double h2 = s.grid().spacing() * s.grid().spacing();
  int checked = 0;
  for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
    const double ratio = dt / (p.ddu[i] * h2);
    if (ratio > 1e-2) continue;
    const double euler = dt * s.phi_dot[i];
    EXPECT_LE(std::abs(phi[i] - euler), 2.0 * ratio * std::abs(euler)) << "node " << i;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(StepImplicit, BoundaryConditionsHold) {
  const auto next = step_implicit(initial_state(default_family()), 1e-2);
  const auto phi = next.phi();
  EXPECT_EQ(phi.back(), 0.0);
  const double h = next.grid().spacing();
  const double slope = (-3 * phi[0] + 4 * phi[1] - phi[2]) / (2 * h);
  double scale = 0.0;
  for (std::size_t i = 1; i < phi.size(); ++i) scale = std::max(scale, std::abs(phi[i] - phi[i - 1]) / h);
  EXPECT_LE(std::abs(slope), 1e-10 * scale);
  next.potential().require_positive();
}

TEST(StepImplicit, KahlerEinsteinStateIsFixed) {
  const auto s = default_ke().as_state(default_family());
  const auto next = step_implicit(s, 0.1);
  const auto a = s.phi(), b = next.phi();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(SnapshotSchedule, IncludesEndpointsAndBrackets) {
  StepperConfig c;
  c.t_end = 2.0;
  c.snapshot_times = {0.5, 1.0, 3.0};
  c.bracket_snapshots = true;
  const auto t = snapshot_schedule(c);
  const std::vector<double> expected{0.0, 0.499, 0.5, 0.501, 0.999, 1.0, 1.001, 2.0};
  ASSERT_EQ(t.size(), expected.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t[i], expected[i], 1e-12);
}

TEST(RunFlow, ZeroEndTimeGivesInitialCondition) {
  StepperConfig c;
  c.t_end = 0.0;
  const auto run = run_flow(c, ModelConfig{});
  ASSERT_EQ(run.snapshots.size(), 1u);
  for (double x : run.snapshots[0].phi()) EXPECT_EQ(x, 0.0);
}

TEST(RunFlow, SnapshotsAreOrderedAndKahler) {
  const auto& run = default_run();
  EXPECT_EQ(run.snapshots.back().t, 15.0);
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    if (k > 0) {
      EXPECT_GT(run.snapshots[k].t, run.snapshots[k - 1].t);
    }
    run.snapshots[k].potential().require_positive();
    EXPECT_EQ(run.snapshots[k].phi().back(), 0.0);
  }
}

TEST(RunFlow, CurveCoefficientDecaysExactly) {
  for (const auto& s : default_run().snapshots) {
    const double expected = std::exp(-s.t) + 2 * std::exp(-24.0);
    EXPECT_NEAR(s.potential().du.front(), expected, 1e-6 * expected);
  }
}

TEST(RunFlow, GapToKahlerEinsteinShrinksAfterT5) {
  double previous = std::numeric_limits<double>::infinity();
  const auto ke_phi = default_ke().phi;
  for (const auto& s : default_run().snapshots) {
    if (s.t < 5.0) continue;
    const auto phi = s.phi();
    double gap = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) gap = std::max(gap, std::abs(phi[i] - ke_phi[i]));
    EXPECT_LT(gap, previous) << "t = " << s.t;
    previous = gap;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(SolveKe, ConvergesToEinsteinMetric) {
  const auto& ke = default_ke();
  EXPECT_LE(ke.residual, 1e-10);
  ke.psi.require_positive();
  const auto R = scalar_curvature(ke.psi);
  const auto [a, b] = ke.psi.grid.interior(0.05);
  for (std::size_t i = a; i < b; ++i) EXPECT_NEAR(R[i], -2.0, 1e-3);
  EXPECT_EQ(ke.phi.back(), 0.0);
  EXPECT_FALSE(ke.damping.empty());
}

TEST(SolveKe, StationaryRhsVanishes) {
  const auto s = default_ke().as_state(default_family());
  const auto [a, b] = s.grid().interior(0.0);
  for (std::size_t i = a + 1; i + 1 < b; ++i) EXPECT_NEAR(s.phi_dot[i], 0.0, 1e-10);
}
