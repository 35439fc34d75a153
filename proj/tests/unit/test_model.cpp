#include <gtest/gtest.h>

#include <cmath>

#include <krf/model.hpp>

using namespace krf;

TEST(ModelConfig, Validation) {
  EXPECT_NO_THROW(ModelConfig{}.validate());
  EXPECT_THROW((ModelConfig{0.0}.validate()), Error);
  EXPECT_THROW((ModelConfig{1.0, -4.0}.validate()), Error);
  EXPECT_THROW((ModelConfig{1.0, -12.0, -13.0}.validate()), Error);
}

TEST(SectionNorm, Examples) {
  EXPECT_DOUBLE_EQ(section_norm(0.0), 1.0);
  EXPECT_NEAR(section_norm(std::log(0.25)), 1.0 / 16, 1e-16);  // r = 1/2
  EXPECT_DOUBLE_EQ(section_norm(-4.0), std::exp(-8.0));
}

TEST(ReferenceFamily, ProfilesMatchClosedForms) {
  const ReferenceFamily fam(ModelConfig{});
  const auto& g = fam.grid();
  for (std::size_t i = 0; i < g.size(); i += 16) {
    const double e2 = std::exp(2 * g[i]);
    EXPECT_DOUBLE_EQ(fam.u_chi().u[i], e2);
    EXPECT_NEAR(fam.u_0().du[i], 2 * e2 + 1, 1e-15);
    EXPECT_NEAR(fam.u_0().ddu[i], 4 * e2, 1e-15);
    EXPECT_DOUBLE_EQ(fam.log_omega_density()[i], e2);
  }
}

TEST(ReferenceFamily, VolumeFormReproducesChi) {
  const ReferenceFamily fam(ModelConfig{});
  const auto d = differentiate(fam.log_omega_density(), fam.grid());
  const auto [a, b] = fam.grid().interior(0.05);
  for (std::size_t i = a; i < b; ++i) {
    EXPECT_NEAR(d.first[i], fam.u_chi().du[i], 1e-3 * fam.u_chi().du[i]);
    EXPECT_NEAR(d.second[i], fam.u_chi().ddu[i], 1e-3 * fam.u_chi().ddu[i]);
  }
}

TEST(ReferencePotential, Examples) {
  const ReferenceFamily fam(ModelConfig{});
  const auto p0 = reference_potential(fam, 0.0);
  for (std::size_t i = 0; i < p0.size(); ++i) EXPECT_DOUBLE_EQ(p0.u[i], fam.u_0().u[i]);
  const auto half = reference_potential(fam, std::log(2.0));
  for (std::size_t i = 0; i < half.size(); i += 32) {
    EXPECT_NEAR(half.u[i], std::exp(2 * fam.grid()[i]) + 0.5 * fam.grid()[i], 1e-14);
  }
  const auto late = reference_potential(fam, 40.0);
  for (std::size_t i = 0; i < late.size(); i += 32) EXPECT_NEAR(late.du[i], fam.u_chi().du[i], 1e-15);
  EXPECT_THROW(reference_potential(fam, -1.0), Error);
}

TEST(ReferencePotential, CurveCoefficientDecaysExponentially) {
  const ReferenceFamily fam(ModelConfig{});
  for (double t : {0.0, 1.0, 5.0, 15.0}) {
    const auto p = reference_potential(fam, t);
    EXPECT_NEAR(p.du.front(), std::exp(-t) + 2 * std::exp(-24.0), 1e-15);
  }
}

TEST(ComparisonBounds, HoldForPositiveB0) {
  const auto b1 = check_comparison_bounds(ReferenceFamily(ModelConfig{}));
  EXPECT_TRUE(std::isfinite(b1.c_low));
  EXPECT_TRUE(std::isfinite(b1.c_high));
  EXPECT_NEAR(b1.vnorm_ratio_min, 4.0, 1e-12);
  EXPECT_NEAR(b1.vnorm_ratio_max, 4.0, 1e-12);
  const auto b10 = check_comparison_bounds(ReferenceFamily(ModelConfig{10.0}));
  EXPECT_GT(b10.c_high, b1.c_high);
}

TEST(ComparisonBounds, DegenerateWithoutCurveArea) {
  const ReferenceFamily chi_only(ModelConfig{}.grid(), 0.0);
  try {
    check_comparison_bounds(chi_only);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerates on the exceptional curve"), std::string::npos);
  }
}
