#include <gtest/gtest.h>

#include <cmath>

#include "conecd/report_io.hpp"

using namespace conecd;

TEST(GridJson, RoundTrip) {
  for (auto kind : {ConeKind::euclidean, ConeKind::spherical}) {
    const auto g = kind == ConeKind::euclidean
                       ? build_eucl_cone(circle_space(8), uniform_radial_grid(3, 1.5), 2.0, "circle:8")
                       : build_sph_cone(circle_space(8), spherical_radial_grid(3), 2.0, "circle:8");
    const auto j = to_json(g);
    const auto back = cone_grid_from_json(json::parse(j.dump()));
    EXPECT_EQ(back.kind, g.kind);
    EXPECT_EQ(back.N, g.N);
    EXPECT_EQ(back.base_ref, "circle:8");
    EXPECT_EQ(back.space.size(), g.space.size());
    EXPECT_LE((back.space.dist - g.space.dist).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(j["points"][0]["base"], nullptr);
  }
}

TEST(GridJson, RejectsTamperedWeights) {
  const auto g = build_eucl_cone(circle_space(8), uniform_radial_grid(3, 1.5), 1.0);
  auto j = to_json(g);
  j["weight"][3] = 99.0;
  EXPECT_THROW(cone_grid_from_json(j), ValidationError);
  auto k = to_json(g);
  k.erase("metadata");
  EXPECT_THROW(cone_grid_from_json(k), ParseError);
}

TEST(Reports, InfinityStrings) {
  EXPECT_EQ(number_or_inf(HUGE_VAL), "inf");
  EXPECT_EQ(number_or_inf(-HUGE_VAL), "-inf");
  EXPECT_EQ(number_or_inf(1.5), 1.5);
  CdReport r;
  r.rhs = -HUGE_VAL;
  r.deficit = -HUGE_VAL;
  r.verdict = CdVerdict::infinite_rhs;
  const auto j = to_json(r);
  EXPECT_EQ(j["rhs"], "-inf");
  EXPECT_EQ(j["verdict"], "infinite-rhs");
}

TEST(Reports, CsvHeaderAndRows) {
  CdVerifySummary s;
  CdReport a;
  a.trial = 2;
  a.t = 0.5;
  a.Nprime = 3;
  CdReport b = a;
  b.reduced = true;
  s.reports = {a, b};
  const auto csv = to_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,t,Nprime,K,lhs,rhs,deficit,slack,verdict,form");
  EXPECT_NE(csv.find("2,0.5,3,0,0,0,0,0,pass,full\n"), std::string::npos);
  EXPECT_NE(csv.find(",reduced\n"), std::string::npos);
}

TEST(Reports, CouplingAndPlan) {
  const auto c = circle_space(8);
  const auto q = solve_ot(c, dirac(c, 0), dirac(c, 2));
  const auto jq = to_json(q);
  EXPECT_EQ(jq["entries"].size(), 1u);
  EXPECT_NEAR(jq["wasserstein"].get<double>(), c.dist(0, 2), 1e-15);
  const auto jp = to_json(build_geodesic_plan(c, q, 0.5, 1e-12));
  EXPECT_EQ(jp["triples"][0]["mid"], 1);
}
