#include <gtest/gtest.h>

#include <cmath>

#include <krf/jet.hpp>

using krf::Jet;

TEST(Jet, VariableHasUnitDerivative) {
  const auto x = Jet<3>::variable(1.5);
  EXPECT_DOUBLE_EQ(x[0], 1.5);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
  EXPECT_DOUBLE_EQ(x[3], 0.0);
}

TEST(Jet, PolynomialDerivatives) {
  const auto x = Jet<4>::variable(2.0);
  const auto p = x * x * x - 3 * x + 1;  // p' = 3x^2 - 3, p'' = 6x, p''' = 6
  EXPECT_DOUBLE_EQ(p[0], 3.0);
  EXPECT_DOUBLE_EQ(p[1], 9.0);
  EXPECT_DOUBLE_EQ(p[2], 12.0);
  EXPECT_DOUBLE_EQ(p[3], 6.0);
  EXPECT_DOUBLE_EQ(p[4], 0.0);
}

TEST(Jet, ExpOfLinear) {
  const auto y = krf::exp(2.0 * Jet<4>::variable(0.3));
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(y[k], std::pow(2.0, k) * std::exp(0.6), 1e-12 * std::pow(2.0, k));
}

TEST(Jet, LogSqrtSinCosAgainstClosedForms) {
  const double x0 = 0.7;
  const auto x = Jet<3>::variable(x0);
  const auto l = krf::log(x);
  EXPECT_NEAR(l[1], 1 / x0, 1e-14);
  EXPECT_NEAR(l[2], -1 / (x0 * x0), 1e-14);
  EXPECT_NEAR(l[3], 2 / (x0 * x0 * x0), 1e-13);
  const auto r = krf::sqrt(x);
  EXPECT_NEAR(r[1], 0.5 / std::sqrt(x0), 1e-14);
  EXPECT_NEAR(r[2], -0.25 * std::pow(x0, -1.5), 1e-14);
  const auto s = krf::sin(x);
  const auto c = krf::cos(x);
  EXPECT_NEAR(s[1], std::cos(x0), 1e-14);
  EXPECT_NEAR(s[2], -std::sin(x0), 1e-14);
  EXPECT_NEAR(s[3], -std::cos(x0), 1e-14);
  EXPECT_NEAR(c[1], -std::sin(x0), 1e-14);
  EXPECT_NEAR(c[3], std::sin(x0), 1e-14);
}

TEST(Jet, QuotientAndChainRule) {
  const double x0 = 0.4;
  const auto x = Jet<2>::variable(x0);
  const auto q = krf::exp(krf::sin(x)) / (1 + x * x);
  // Compare with a central difference of the double version.
  auto f = [](double t) { return std::exp(std::sin(t)) / (1 + t * t); };
  const double h = 1e-4;
  EXPECT_NEAR(q[0], f(x0), 1e-15);
  EXPECT_NEAR(q[1], (f(x0 + h) - f(x0 - h)) / (2 * h), 1e-7);
  EXPECT_NEAR(q[2], (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / (h * h), 1e-5);
}

TEST(Jet, GenericCodeAcceptsPlainNumbers) {
  auto f = [](const auto& t) { return krf::exp(2 * t) + t; };
  EXPECT_DOUBLE_EQ(f(0.0), 1.0);
  EXPECT_DOUBLE_EQ(double(f(0.0L)), 1.0);
  EXPECT_DOUBLE_EQ(f(Jet<1>::variable(0.0))[1], 3.0);
}
