#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include <krf/conical.hpp>

using namespace krf;

namespace {
// ddbar log(1 + |z|^2): constant holomorphic sectional curvature 2.
Hermitian2 fubini_study(const Point4& x) {
  const Real s = norm2(x);
  const std::complex<Real> z1(x[0], x[1]), z2(x[2], x[3]);
  const Real d = (1 + s) * (1 + s);
  return {(1 + s - std::norm(z1)) / d, (1 + s - std::norm(z2)) / d, -std::conj(z1) * z2 / d};
}

struct Flat {
  template <typename T>
  T operator()(const T& rho) const { return krf::exp(rho); }
};
}  // namespace

TEST(ConicalFlatness, CurvatureVanishes) {
  const auto r = con_flatness_check(100, 3);
  EXPECT_EQ(r.evaluated, 100);
  EXPECT_LE(r.max_curvature, 1e-6);
}

TEST(ConicalFlatness, EuclideanControlIsExactlyZero) {
  EXPECT_EQ(con_flatness_check(10, 3, euclidean_metric).max_curvature, 0.0);
}

TEST(ConicalFlatness, DetectsCurvedMetric) {
  const auto r = con_flatness_check(10, 3, fubini_study);
  EXPECT_NEAR(r.max_curvature, 2.0, 1e-6);
}

TEST(ConicalFlatness, ErrorShrinksWithStep) {
  FlatnessSampling coarse, fine;
  coarse.relative_step = 4e-2;
  fine.relative_step = 2e-2;
  const double e_coarse = con_flatness_check(20, 9, conical_metric, coarse).max_curvature;
  const double e_fine = con_flatness_check(20, 9, conical_metric, fine).max_curvature;
  EXPECT_LT(e_fine, 0.25 * e_coarse);
}

TEST(ConicalFlatness, SkipsSamplesNearAxes) {
  FlatnessSampling near_axis;
  near_axis.radius_min = 1e-4;
  near_axis.radius_max = 2e-4;
  const auto r = con_flatness_check(5, 3, conical_metric, near_axis);
  EXPECT_EQ(r.skipped, 5);
  EXPECT_EQ(r.evaluated, 0);
}

TEST(ConicalFlatness, FlattenedCoordinatesGiveNineTimesEuclidean) {
  // u = w^3 pulls |u|^{-4/3}|du|^2 back to 9 |dw|^2.
  const std::complex<double> w(0.6, 0.3);
  const auto u = w * w * w;
  const double g_uu = double(conical_metric(point(u, 0.5)).a11);
  EXPECT_NEAR(g_uu * std::norm(3.0 * w * w), 9.0, 1e-12);
}

TEST(ConPathLength, ClosedFormExamples) {
  EXPECT_NEAR(con_path_length(0.125, 0.0), 3 * 0.5, 1e-15);
  const double d = 0.001;
  EXPECT_NEAR(con_path_length(d, d), 3 * std::sqrt(2.0) * std::cbrt(d), 1e-14);
  EXPECT_THROW(con_path_length(0.0, 0.0), Error);
}

TEST(ConPathLength, QuadratureAgrees) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> mod(0.0, 1.0), arg(0.0, 6.283);
  for (int k = 0; k < 50; ++k) {
    const auto u = std::polar(mod(rng), arg(rng));
    const auto v = std::polar(mod(rng), arg(rng));
    const double exact = con_path_length(u, v);
    EXPECT_NEAR(con_path_length_quadrature(u, v), exact, 1e-8 * exact);
    EXPECT_LE(exact, 3 * (std::cbrt(std::abs(u)) + std::cbrt(std::abs(v))) + 1e-14);
  }
}

TEST(ConBallDiameter, UnitBallAndSandwich) {
  EXPECT_NEAR(con_ball_diameter(1.0, 8).upper_bound, 6 * std::sqrt(2.0), 1e-13);
  const auto b = con_ball_diameter(std::ldexp(1.0, -5));
  EXPECT_GE(b.graph, 0.5 * b.upper_bound);
  EXPECT_LE(b.graph, b.upper_bound);
}

TEST(ConBallDiameter, ScalingExponentIsOneThird) {
  std::vector<double> x, y;
  for (int k = 3; k <= 10; ++k) {
    const double d = std::ldexp(1.0, -k);
    x.push_back(std::log(d));
    y.push_back(std::log(con_ball_diameter(d, 16).upper_bound));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, 1.0 / 3.0, 1e-12);
}

TEST(ConCompareFlowChart, InitialMetricFinite) {
  const auto fam = std::make_shared<const ReferenceFamily>(ModelConfig{});
  const double v = con_compare_flow_chart(initial_state(fam));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
}

TEST(ConCompareFlowChart, FlatMetricClosedForm) {
  // For psi = e^rho the u-term dominates, w^{2/3} e^{rho/3} / 4 at |v| = 1 and the outer interior node.
  const auto p = PotentialProfile::from_closed_form(RadialGrid(-12, 0, 257), Flat{});
  const double rho_hi = p.grid[p.grid.interior(0.05).second - 1];
  const double expected = std::cbrt(4.0) * std::exp(rho_hi / 3.0) / 4.0;
  EXPECT_NEAR(con_compare_flow_chart(p), expected, 1e-9 * expected);
}

TEST(ConCompareFlowChart, RejectsBadFloor) {
  const auto fam = std::make_shared<const ReferenceFamily>(ModelConfig{});
  EXPECT_THROW(con_compare_flow_chart(initial_state(fam), ChartSampling{1.5}), Error);
}
