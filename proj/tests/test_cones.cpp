#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "conecd/cones.hpp"
#include "oracles.hpp"

using namespace conecd;
constexpr double pi = std::numbers::pi;

TEST(EuclCone, Distances) {
  EXPECT_DOUBLE_EQ(eucl_cone_dist(1, 2, 0), 1.0);
  EXPECT_DOUBLE_EQ(eucl_cone_dist(3, 4, pi / 2), 5.0);
  EXPECT_DOUBLE_EQ(eucl_cone_dist(1, 1, pi), 2.0);
  EXPECT_DOUBLE_EQ(eucl_cone_dist(1, 1, pi + 5e-10), 2.0);
  EXPECT_THROW(eucl_cone_dist(-1, 1, 0), DomainError);
}

TEST(EuclCone, PlanarOracleAndHomothety) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> R(0.0, 5.0), A(0.0, 2 * pi);
  for (int k = 0; k < 2000; ++k) {
    const double s = R(rng), t = R(rng), a = A(rng), b = A(rng);
    double d = std::abs(a - b);
    d = std::min(d, 2 * pi - d);
    EXPECT_NEAR(eucl_cone_dist(s, t, d), oracle::planar_distance(s, a, t, b), 1e-12);
    EXPECT_NEAR(eucl_cone_dist(2.5 * s, 2.5 * t, d), 2.5 * eucl_cone_dist(s, t, d), 1e-12);
    EXPECT_EQ(eucl_cone_dist(s, t, d), eucl_cone_dist(t, s, d));
  }
}

TEST(SphCone, Distances) {
  EXPECT_NEAR(sph_cone_dist(0.4, 0.9, 0), 0.5, 1e-15);
  for (double d : {0.0, 0.3, 1.7, pi}) EXPECT_NEAR(sph_cone_dist(pi / 2, pi / 2, d), d, 1e-15);
  EXPECT_NEAR(sph_cone_dist(0, 0.7, 2.0), 0.7, 1e-15);
  EXPECT_NEAR(sph_cone_dist(0, pi, 1.0), pi, 1e-15);
  EXPECT_THROW(sph_cone_dist(-0.1, 1, 0), DomainError);
  EXPECT_THROW(sph_cone_dist(0.1, 3.2, 0), DomainError);
}

TEST(SphCone, SphereOracle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> R(0.0, pi), A(0.0, 2 * pi);
  for (int k = 0; k < 2000; ++k) {
    const double s = R(rng), t = R(rng), a = A(rng), b = A(rng);
    double d = std::abs(a - b);
    d = std::min(d, 2 * pi - d);
    EXPECT_NEAR(sph_cone_dist(s, t, d), oracle::sphere_distance(s, a, t, b), 1e-12);
  }
}

TEST(Ricci, EuclideanThresholdIdentity) {
  EXPECT_EQ(cone_ricci(2.0, 1.0, 7.0, 2), 1.0);
  EXPECT_EQ(cone_ricci(0.0, 0.0, 3.0, 5), 0.0);
  for (int n = 1; n <= 6; ++n)
    for (double v2 : {0.0, 0.5, 2.0}) EXPECT_EQ(cone_ricci((n - 1) * v2, v2, 1.3, n), 0.0);
  EXPECT_THROW(cone_ricci(0.0, -1.0, 0.0, 2), DomainError);
}

TEST(Ricci, SphericalThresholdIdentity) {
  const auto r0 = sph_cone_ricci(0.0, 0.0, 1.0, 1.0, 3);
  EXPECT_EQ(r0.ricci, 3.0);
  EXPECT_EQ(r0.norm2, 1.0);
  for (int n = 1; n <= 5; ++n) {
    const auto eq = sph_cone_ricci((n - 1) * 2.0, 2.0, 0.7, pi / 2, n);
    EXPECT_NEAR(eq.ricci, n * eq.norm2, 1e-12);
    for (double r = 0.05; r < pi; r += 0.05)
      for (double lam : {0.0, 0.4, 2.0}) {
        const auto x = sph_cone_ricci((n - 1) * 1.5, 1.5, lam, r, n);
        EXPECT_NEAR(x.ricci - n * x.norm2, 0.0, 1e-12);
      }
  }
  EXPECT_THROW(sph_cone_ricci(0, 1, 0, 0.0, 2), DomainError);
  EXPECT_THROW(sph_cone_ricci(0, 1, 0, pi, 2), DomainError);
}

TEST(RadialMass, ClosedForms) {
  EXPECT_NEAR(radial_mass_euclidean(0.5, 1.5, 1.0), (1.5 * 1.5 - 0.25) / 2, 1e-15);
  EXPECT_NEAR(radial_mass_euclidean(0.0, 2.0, 2.5), std::pow(2.0, 3.5) / 3.5, 1e-13);
  EXPECT_NEAR(radial_mass_spherical(0.0, pi, 1.0), 2.0, 1e-13);
  EXPECT_NEAR(radial_mass_spherical(0.2, 1.1, 2.0), 0.5 * (0.9 - 0.5 * (std::sin(2.2) - std::sin(0.4))), 1e-13);
  EXPECT_NEAR(radial_mass_spherical(0.0, pi, 3.0), 4.0 / 3.0, 1e-13);
}

TEST(BuildEuclCone, SmallGrid) {
  const auto g = build_eucl_cone(circle_space(4), {1.0}, 1.0);
  ASSERT_EQ(g.space.size(), 5);
  EXPECT_TRUE(g.point(0).is_apex());
  // Cell [0.5, 1]: integral of s ds = 3/8; apex takes [0, 0.5] = 1/8 times 2 pi.
  for (Index i = 1; i < 5; ++i) EXPECT_NEAR(g.space.w(i), pi / 2 * 0.375, 1e-15);
  EXPECT_NEAR(g.space.w(0), 2 * pi * 0.125, 1e-15);
  EXPECT_TRUE(validate(g.space).ok());
}

TEST(BuildEuclCone, EmptyGridAndErrors) {
  const auto g = build_eucl_cone(circle_space(4), {}, 1.0);
  ASSERT_EQ(g.space.size(), 1);
  EXPECT_EQ(g.space.dist(0, 0), 0.0);
  EXPECT_THROW(build_eucl_cone(circle_space(4), {1.0, 0.5}, 1.0), DomainError);
  EXPECT_THROW(build_eucl_cone(circle_space(4), {0.0, 0.5}, 1.0), DomainError);
  FiniteMetricMeasureSpace wide = circle_space(2);
  wide.dist(0, 1) = wide.dist(1, 0) = 3.3;
  try {
    build_eucl_cone(wide, {1.0}, 1.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos);
  }
  wide.dist(0, 1) = wide.dist(1, 0) = pi + 5e-10;
  EXPECT_TRUE(build_eucl_cone(wide, {1.0}, 1.0).base_distance_clamped);
}

TEST(BuildEuclCone, TotalMassAndTriangle) {
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  EXPECT_EQ(g.space.size(), 2049);
  EXPECT_NEAR(g.space.total_mass(), 4 * pi, 1e-10);
  const auto small = build_eucl_cone(circle_space(16), uniform_radial_grid(8, 1.0), 1.0);
  EXPECT_TRUE(validate(small.space).ok());
}

TEST(BuildSphCone, PolesAndMass) {
  const auto g = build_sph_cone(circle_space(64), spherical_radial_grid(32), 1.0);
  EXPECT_EQ(g.space.size(), 2050);
  EXPECT_NEAR(g.space.total_mass(), 4 * pi, 1e-6);
  EXPECT_EQ(g.space.labels[0], "S");
  EXPECT_EQ(g.space.labels[1], "N");
  EXPECT_NEAR(g.space.dist(0, 1), pi, 1e-15);
  const auto empty = build_sph_cone(circle_space(8), {}, 1.0);
  ASSERT_EQ(empty.space.size(), 2);
  EXPECT_NEAR(empty.space.dist(0, 1), pi, 1e-15);
  EXPECT_THROW(build_sph_cone(circle_space(8), {1.0, pi}, 1.0), DomainError);
}

TEST(BuildSphCone, EquatorialCopy) {
  const auto base = circle_space(8);
  const auto g = build_sph_cone(base, {pi / 2}, 1.0);
  const double cell = radial_mass_spherical(pi / 4, 3 * pi / 4, 1.0);
  for (Index b = 0; b < 8; ++b) {
    EXPECT_NEAR(g.space.w(g.index_of(b, 0)), base.w(b) * cell, 1e-15);
    for (Index c = 0; c < 8; ++c) EXPECT_NEAR(g.space.dist(g.index_of(b, 0), g.index_of(c, 0)), base.dist(b, c), 1e-15);
  }
}

TEST(ConeGrid, GridHelpers) {
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  EXPECT_EQ(g.apex_indices(), std::vector<Index>{0});
  EXPECT_EQ(*g.point(g.index_of(5, 3)).base, 5);
  EXPECT_EQ(*g.point(g.index_of(5, 3)).radial_index, 3);
  EXPECT_NEAR(g.max_spacing(), 2 * pi / 64 * 2.0, 1e-14);
  EXPECT_TRUE(g.is_apex(0));
  EXPECT_FALSE(g.is_apex(1));
  EXPECT_TRUE(g.is_apex(1, 0.07));
  const auto s = build_sph_cone(circle_space(64), spherical_radial_grid(32), 1.0);
  EXPECT_NEAR(s.max_spacing(), 2 * pi / 64 * std::sin(16 * pi / 33), 1e-14);
  EXPECT_TRUE(s.is_apex(s.index_of(0, 31), 0.1));
}

TEST(SphConeDist, AccurateNearZeroAndPi) {
  const double pi = std::numbers::pi;
  const double t = 1.0 + 1e-9;
  EXPECT_NEAR(sph_cone_dist(1.0, t, 0.0), t - 1.0, 1e-22);
  EXPECT_NEAR(sph_cone_dist(0.5, 0.5, 1e-8), 1e-8 * std::sin(0.5), 1e-20);
  // Through a pole: D = s + t.
  const double u = 0.5 * pi - 1e-9, v = pi - 0.2 - 1e-7;
  EXPECT_NEAR(sph_cone_dist(0.5 * pi, u, pi), 0.5 * pi + u, 1e-15);
  EXPECT_NEAR(sph_cone_dist(0.2, v, pi), 0.2 + v, 1e-15);
}
