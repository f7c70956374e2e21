#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conecd/geodesic.hpp"
#include "conecd/measures.hpp"

using namespace conecd;
constexpr double pi = std::numbers::pi;

TEST(Midpoints, Examples) {
  const auto c = circle_space(8);
  EXPECT_EQ(midpoints(c, 3, 3, 1e-12), std::vector<Index>{3});
  EXPECT_EQ(midpoints(c, 0, 2, 1e-12), std::vector<Index>{1});
  // Antipodes on the circle have two midpoints.
  EXPECT_EQ(midpoints(c, 0, 4, 1e-12), (std::vector<Index>{2, 6}));
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  const auto m = midpoints(g.space, g.index_of(0, 15), g.index_of(32, 15), g.max_spacing());
  EXPECT_NE(std::find(m.begin(), m.end(), Index{0}), m.end());
}

TEST(GeodesicPlan, IdentityCoupling) {
  const auto g = build_eucl_cone(circle_space(16), uniform_radial_grid(6, 1.0), 1.0);
  const auto mu = normalized_restriction(g.space, g.space.support());
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, mu, mu), 0.5, 1e-12);
  EXPECT_EQ(plan.max_slack, 0.0);
  for (Index i = 0; i < g.space.size(); ++i) EXPECT_NEAR(plan.intermediate[i], mu[i], 1e-12);
}

TEST(GeodesicPlan, CircleMidpoint) {
  const auto c = circle_space(8);
  const auto plan = build_geodesic_plan(c, solve_ot(c, dirac(c, 0), dirac(c, 2)), 0.5, 1e-12);
  ASSERT_EQ(plan.triples.size(), 1u);
  EXPECT_EQ(plan.triples[0].i, 0);
  EXPECT_EQ(plan.triples[0].mid, 1);
  EXPECT_EQ(plan.triples[0].j, 2);
  EXPECT_EQ(plan.intermediate[1], 1.0);
}

TEST(GeodesicPlan, PlanarMidpointOfUnitVectors) {
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  // (phi = 0, r = 1) and (phi = pi/2, r = 1): midpoint at angle pi/4, radius cos(pi/4).
  const Index a = g.index_of(0, 15), b = g.index_of(16, 15);
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, dirac(g.space, a), dirac(g.space, b)), 0.5,
                                        g.max_spacing());
  const auto& p = g.point(plan.triples[0].mid);
  EXPECT_NEAR(p.radial, std::cos(pi / 4), 2 / 32.0);
  EXPECT_EQ(*p.base, 8);
  EXPECT_LE(plan.max_slack, g.max_spacing());
}

TEST(GeodesicPlan, Errors) {
  const auto c = circle_space(8);
  const auto q = solve_ot(c, dirac(c, 0), dirac(c, 1));
  EXPECT_THROW(build_geodesic_plan(c, q, 0.0, 1.0), DomainError);
  EXPECT_THROW(build_geodesic_plan(c, q, 1.0, 1.0), DomainError);
  try {
    build_geodesic_plan(c, q, 0.5, 1e-3);
    FAIL();
  } catch (const CoarseGridError& e) {
    EXPECT_EQ(e.i(), 0);
    EXPECT_EQ(e.j(), 1);
  }
}

TEST(ApexScan, GenericPlansAvoidApex) {
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    const auto [a, b] = generic_pair(g, 21, trial);
    const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, a, b), 0.5, 2 * g.max_spacing());
    const auto rep = apex_scan(plan, g, 1e-9);
    EXPECT_EQ(rep.apex_mass, 0.0);
    EXPECT_TRUE(rep.pattern_ok());
  }
}

TEST(ApexScan, AntipodalDiracs) {
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  const auto d = antipodal_dirac(g);
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, d.mu0, d.mu1), 0.5, g.max_spacing());
  const auto rep = apex_scan(plan, g, 1e-9);
  EXPECT_EQ(rep.apex_mass, 1.0);
  EXPECT_TRUE(rep.pattern_ok());
  ASSERT_TRUE(rep.base_pair);
  EXPECT_EQ(*rep.base_pair, std::make_pair(Index{0}, Index{32}));
  EXPECT_EQ(rep.radius_ratios, std::vector<double>{1.0});
}

TEST(ApexScan, SphericalRatio) {
  const auto g = build_sph_cone(circle_space(64), spherical_radial_grid(32), 1.0);
  const double s = 1.0 / 3.0;
  const auto d = antipodal_dirac(g, s);
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, d.mu0, d.mu1), s, g.max_spacing());
  EXPECT_EQ(plan.triples[0].mid, 0);  // south pole
  const auto rep = apex_scan(plan, g, 1e-9);
  EXPECT_TRUE(rep.pattern_ok());
  ASSERT_EQ(rep.radius_ratios.size(), 1u);
  EXPECT_NEAR(rep.radius_ratios[0], 2.0, 1e-12);
}

TEST(ApexScan, DegenerateAndViolations) {
  const auto g = build_eucl_cone(circle_space(8), uniform_radial_grid(4, 1.0), 1.0);
  const auto d = dirac(g.space, 0);
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, d, d), 0.5, 1e-12);
  const auto rep = apex_scan(plan, g, 1e-9);
  EXPECT_EQ(rep.apex_mass, 1.0);
  EXPECT_EQ(rep.degenerate_mass, 1.0);
  EXPECT_TRUE(rep.routes.empty());
  // Unequal radii through the apex break the pattern.
  GeodesicPlan bad;
  bad.s = 0.5;
  bad.triples.push_back({g.index_of(0, 1), 0, g.index_of(4, 3), 1.0, 0.0});
  const auto r2 = apex_scan(bad, g, 1e-9);
  EXPECT_FALSE(r2.pattern_ok());
  EXPECT_NEAR(r2.max_radius_error, 0.5, 1e-15);
}

TEST(RestrictAwayFromApex, ConvergesWhenApexMassIsZero) {
  const auto g = build_eucl_cone(circle_space(64), uniform_radial_grid(32, 2.0), 1.0);
  const auto [a, b] = generic_pair(g, 4, 0);
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, a, b), 0.5, 2 * g.max_spacing());
  double prev = HUGE_VAL;
  for (double eps : {0.5, 0.3, 0.1, 1e-9}) {
    const auto r = restrict_away_from_apex(plan, g, eps);
    const double tv = r.tv_source + r.tv_intermediate + r.tv_target;
    EXPECT_LE(tv, prev + 1e-15);
    prev = tv;
  }
  EXPECT_LE(prev, 1e-14);
}
