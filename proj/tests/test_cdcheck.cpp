#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "conecd/cdcheck.hpp"
#include "conecd/report_io.hpp"

using namespace conecd;

namespace {

FiniteMetricMeasureSpace weighted_circle(Index n, std::mt19937_64& rng) {
  auto s = circle_space(n);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  for (auto& w : s.weight) w = U(rng);
  return s;
}

ConeGrid small_eucl() { return build_eucl_cone(circle_space(32), uniform_radial_grid(12, 2.0), 1.0); }

}  // namespace

TEST(RenyiEntropy, ClosedForms) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> N(1.0, 6.0);
  for (int k = 0; k < 50; ++k) {
    const auto s = weighted_circle(9, rng);
    const double np = N(rng);
    const double V = s.total_mass();
    const auto uni = normalized_restriction(s, s.support());
    EXPECT_NEAR(renyi_entropy(uni, s, np), -std::pow(V, 1.0 / np), 1e-12);
    const Index i = k % 9;
    EXPECT_NEAR(renyi_entropy(dirac(s, i), s, np), -std::pow(s.w(i), 1.0 / np), 1e-12);
  }
}

TEST(RenyiEntropy, UniformMinimizesAndLimits) {
  std::mt19937_64 rng(2);
  const auto s = weighted_circle(7, rng);
  const auto uni = normalized_restriction(s, s.support());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> m(7);
    for (double& v : m) v = U(rng);
    double tot = 0;
    for (double v : m) tot += v;
    for (double& v : m) v /= tot;
    const auto mu = make_probability(s, m);
    // Jensen: -sum rho^(1-1/N) w >= -V^(1/N).
    EXPECT_GE(renyi_entropy(mu, s, 3.0), renyi_entropy(uni, s, 3.0) - 1e-12);
  }
  EXPECT_NEAR(renyi_entropy(uni, s, 1.0), -s.total_mass(), 1e-12);
  EXPECT_THROW(renyi_entropy(uni, s, 0.5), DomainError);
}

TEST(CdInequality, IdentityPlanAtKZero) {
  const auto g = small_eucl();
  const auto [mu, other] = generic_pair(g, 1, 0);
  (void)other;
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, mu, mu), 0.5, 1e-12);
  for (bool reduced : {false, true}) {
    const auto r = cd_inequality_check(mu, mu, plan, g.space, 0.0, 3.0, reduced, 0.5, 1e-9);
    EXPECT_NEAR(r.deficit, 0.0, 1e-12);
    EXPECT_EQ(r.verdict, CdVerdict::pass);
  }
}

TEST(CdInequality, Errors) {
  const auto g = small_eucl();
  const auto [a, b] = generic_pair(g, 1, 0);
  const auto q = solve_ot(g.space, a, b);
  const auto plan = build_geodesic_plan(g.space, q, 0.5, 2 * g.max_spacing());
  EXPECT_THROW(cd_inequality_check(a, b, plan, g.space, 0.0, 2.0, false, 0.25, 0.1), DomainError);
  auto d = dirac(g.space, 0);
  d.ac[0] = false;  // mass on a point of zero reference weight
  EXPECT_THROW(cd_inequality_check(d, b, plan, g.space, 0.0, 2.0, false, 0.5, 0.1), ValidationError);
  EXPECT_THROW(cd_inequality_check(a, b, plan, g.space, 0.0, 0.5, false, 0.5, 0.1), DomainError);
}

TEST(CdInequality, InfiniteCoefficientFails) {
  const auto g = build_sph_cone(circle_space(32), spherical_radial_grid(12), 1.0);
  const auto [a, b] = near_antipodal(g);
  const auto plan = build_geodesic_plan(g.space, solve_ot(g.space, a, b), 0.5, 2 * g.max_spacing());
  // K theta^2 >= N' pi^2 for any coupled pair at distance > pi/sqrt(K/N').
  const auto r = cd_inequality_check(a, b, plan, g.space, 100.0, 2.0, true, 0.5, 0.1);
  EXPECT_TRUE(r.infinite_rhs);
  EXPECT_EQ(r.verdict, CdVerdict::infinite_rhs);
  EXPECT_TRUE(is_failure(r.verdict));
  EXPECT_EQ(r.rhs, -HUGE_VAL);
}

TEST(CdVerify, ZeroTrials) {
  const auto s = cd_verify(small_eucl(), 0.0, 2.0, 0);
  EXPECT_TRUE(s.reports.empty());
  EXPECT_TRUE(s.all_pass());
  EXPECT_THROW(cd_verify(small_eucl(), 0.0, 2.0, -1), DomainError);
  CdVerifyOptions bad;
  bad.t_list = {1.0};
  EXPECT_THROW(cd_verify(small_eucl(), 0.0, 2.0, 1, bad), DomainError);
}

TEST(CdVerify, PositiveControlOnSmallGrid) {
  const auto g = small_eucl();
  CdVerifyOptions opt;
  opt.nprimes = {2.0, 3.0};
  opt.seed = 8;
  const auto s = cd_verify(g, 0.0, 2.0, 3, opt);
  EXPECT_EQ(s.reports.size(), 3u * 3u * 2u * 2u);
  EXPECT_TRUE(s.all_pass()) << s.min_deficit;
  EXPECT_EQ(s.ordering_violations, 0);
  EXPECT_EQ(s.k0_mismatches, 0);
  EXPECT_DOUBLE_EQ(s.eps, 5 * g.max_spacing());
}

TEST(CdVerify, IndependentOfThreadCount) {
  const auto g = small_eucl();
  CdVerifyOptions opt;
  opt.seed = 3;
  opt.jobs = 1;
  const auto one = to_json(cd_verify(g, 0.0, 2.0, 4, opt)).dump();
  opt.jobs = 4;
  EXPECT_EQ(one, to_json(cd_verify(g, 0.0, 2.0, 4, opt)).dump());
}

TEST(CdVerify, NprimeSet) {
  EXPECT_EQ(nprime_set(2.0), (std::vector<double>{2.0, 3.0, 4.0}));
  EXPECT_EQ(nprime_set(1.0), (std::vector<double>{1.0, 2.0}));
}

TEST(BonnetMyers, Examples) {
  const auto g = build_sph_cone(circle_space(16), spherical_radial_grid(8), 1.0);
  EXPECT_TRUE(bonnet_myers_check(g.space, 1.0, 2.0));   // pi <= pi
  EXPECT_FALSE(bonnet_myers_check(g.space, 2.0, 2.0));  // pi > pi / sqrt 2
  EXPECT_TRUE(bonnet_myers_check(g.space, 0.0, 2.0));
  EXPECT_TRUE(bonnet_myers_check(g.space, -1.0, 2.0));
  EXPECT_FALSE(bonnet_myers_check(g.space, 1.0, 1.0));
}
