#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <krf/errors.hpp>
#include <krf/grid.hpp>

using krf::RadialGrid;

namespace {
std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g[i]);
  return v;
}
}  // namespace

TEST(RadialGrid, NodesAndDerivedFields) {
  const RadialGrid g(-12, 0, 513);
  EXPECT_DOUBLE_EQ(g[0], -12.0);
  EXPECT_DOUBLE_EQ(g[512], 0.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 12.0 / 512);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  EXPECT_NEAR(g.s(512), 1.0, 1e-15);
  EXPECT_NEAR(g.r(0), std::exp(-6.0), 1e-18);
}

TEST(RadialGrid, RejectsInvalidRanges) {
  EXPECT_THROW(RadialGrid(0, 0, 10), krf::Error);
  EXPECT_THROW(RadialGrid(1, 0, 10), krf::Error);
  EXPECT_THROW(RadialGrid(-1, 0, 1), krf::Error);
}

TEST(RadialGrid, InteriorDropsFractionAtEachEnd) {
  const RadialGrid g(-12, 0, 513);
  const auto [first, last] = g.interior(0.05);
  EXPECT_EQ(first, 25u);
  EXPECT_EQ(last, 513u - 25u);
}

TEST(RadialGrid, RefinementNestsNodes) {
  const RadialGrid g(-12, 0, 257);
  const auto f = g.refined();
  EXPECT_EQ(f.size(), 513u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(f[2 * i], g[i], 1e-13);
}

TEST(Differentiate, LinearIsExact) {
  const RadialGrid g(-3, 1, 33);
  const auto d = krf::differentiate(sample(g, [](double x) { return x; }), g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(d.first[i], 1.0, 1e-12);
    EXPECT_NEAR(d.second[i], 0.0, 1e-9);
  }
}

TEST(Differentiate, SecondOrderOnExponential) {
  auto error = [](std::size_t n) {
    const RadialGrid g(-4, 0, n);
    const auto d = krf::differentiate(sample(g, [](double x) { return std::exp(2 * x); }), g);
    double e = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      e = std::max({e, std::abs(d.first[i] - 2 * std::exp(2 * g[i])), std::abs(d.second[i] - 4 * std::exp(2 * g[i]))});
    }
    return e;
  };
  const double ratio = error(129) / error(257);
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);
}

TEST(Differentiate, SineMatchesClosedForm) {
  const RadialGrid g(-2, 0, 257);
  const auto d = krf::differentiate(sample(g, [](double x) { return std::sin(x); }), g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LT(std::abs(d.first[i] - std::cos(g[i])), 1e-4);
    EXPECT_LT(std::abs(d.second[i] + std::sin(g[i])), 1e-4);
  }
}

TEST(Differentiate, RejectsCoarseGrid) {
  const RadialGrid g(-1, 0, 4);
  try {
    krf::differentiate(std::vector<double>(4, 0.0), g);
    FAIL();
  } catch (const krf::Error& e) {
    EXPECT_NE(std::string(e.what()).find("grid too coarse"), std::string::npos);
  }
}

TEST(Interpolate, LinearBetweenNodes) {
  const RadialGrid g(0, 1, 5);
  const std::vector<double> f{0, 1, 4, 9, 16};
  EXPECT_DOUBLE_EQ(krf::interpolate(f, g, 0.125), 0.5);
  EXPECT_DOUBLE_EQ(krf::interpolate(f, g, 1.0), 16.0);
  EXPECT_DOUBLE_EQ(krf::interpolate(f, g, -1.0), 0.0);
}
