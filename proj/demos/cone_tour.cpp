// Walks through the library on small cones over a 32-point circle:
// distances, an optimal coupling, apex routing, one CD check and a spectral gap.

#include <cstdio>

#include "conecd/conecd.hpp"

using namespace conecd;

int main() {
  const auto base = circle_space(32);
  const auto plane = build_eucl_cone(base, uniform_radial_grid(16, 2.0), 1.0, "circle:32");
  const auto sphere = build_sph_cone(base, spherical_radial_grid(16), 1.0, "circle:32");
  std::printf("Euclidean cone: %lld points, max spacing %.4f\n", static_cast<long long>(plane.space.size()),
              plane.max_spacing());
  std::printf("spherical cone: %lld points, diameter %.6f\n", static_cast<long long>(sphere.space.size()),
              diameter(sphere.space));

  // Opposite points at radius 1 are 2 apart.
  const Index a = plane.index_of(0, 7), b = plane.index_of(16, 7);
  std::printf("d(r=%.3f, phi=0; r=%.3f, phi=pi) = %.6f\n", plane.point(a).radial, plane.point(b).radial,
              plane.space.dist(a, b));

  const auto [mu0, mu1] = generic_pair(plane, 1, 0);
  const auto q = solve_ot(plane.space, mu0, mu1);
  std::printf("W2 between two blob measures: %.6f (%zu coupled pairs)\n", q.wasserstein(), q.entries.size());

  const auto plan = build_geodesic_plan(plane.space, q, 0.5, 2 * plane.max_spacing());
  std::printf("midpoint plan: max slack %.4f, apex mass %.3g\n", plan.max_slack, apex_scan(plan, plane, 1e-9).apex_mass);

  const auto dd = antipodal_dirac(plane);
  const auto through = apex_scan(
      build_geodesic_plan(plane.space, solve_ot(plane.space, dd.mu0, dd.mu1), 0.5, plane.max_spacing()), plane, 1e-9);
  std::printf("antipodal Diracs: apex mass %.3g, pattern %s\n", through.apex_mass, through.pattern_ok() ? "ok" : "broken");

  for (const auto& r : cd_check_pair(plane.space, mu0, mu1, 0.0, {2.0}, {0.5}, 5 * plane.max_spacing(),
                                     2 * plane.max_spacing(), 0))
    std::printf("CD(0,2) %s form: lhs %.5f rhs %.5f -> %s\n", r.reduced ? "reduced" : "full", r.lhs, r.rhs,
                to_string(r.verdict));

  const auto gap = lichnerowicz_check(sphere, 1, default_bandwidth(sphere), 0.15);
  std::printf("spectral gap of the spherical cone: %.4f (bound %.0f) -> %s\n", gap.gap, gap.bound,
              gap.pass ? "PASS" : "FAIL");
  return 0;
}
