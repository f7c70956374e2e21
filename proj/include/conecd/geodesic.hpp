#pragma once

// Three-point plans (x_0, x_s, x_1) realizing a discrete Wasserstein geodesic
// at a fixed fraction s, and the scan for mass routed through cone apexes.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conecd/cones.hpp"
#include "conecd/error.hpp"
#include "conecd/mms.hpp"
#include "conecd/transport.hpp"

namespace conecd {

/// Points k with |d(i,k) - d(i,j)/2| <= tol and |d(k,j) - d(i,j)/2| <= tol,
/// ordered by total slack, then index.
inline std::vector<Index> midpoints(const FiniteMetricMeasureSpace& space, Index i, Index j, double tol) {
  const double half = 0.5 * space.dist(i, j);
  std::vector<std::pair<double, Index>> found;
  for (Index k = 0; k < space.size(); ++k) {
    const double a = std::abs(space.dist(i, k) - half);
    const double b = std::abs(space.dist(k, j) - half);
    if (a <= tol && b <= tol) found.emplace_back(a + b, k);
  }
  std::sort(found.begin(), found.end());
  std::vector<Index> out;
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

struct PlanTriple {
  Index i;
  Index mid;
  Index j;
  double w;
  double slack;  // |d(i,mid) - s d(i,j)| + |d(mid,j) - (1-s) d(i,j)|
};

struct GeodesicPlan {
  std::vector<PlanTriple> triples;
  double s = 0.5;
  double tol = 0.0;
  double max_slack = 0.0;
  std::vector<double> source;
  std::vector<double> target;
  ProbabilityVector intermediate;
};

/// Thrown when no grid point is an s-intermediate point of a coupled pair to
/// within the requested tolerance.
class CoarseGridError : public ValidationError {
 public:
  CoarseGridError(Index i, Index j, double slack, double tol)
      : ValidationError("geodesic plan: best intermediate point for pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ") has slack " + std::to_string(slack) + " > tol " + std::to_string(tol) +
                        " (grid too coarse)"),
        i_(i),
        j_(j) {}
  Index i() const { return i_; }
  Index j() const { return j_; }

 private:
  Index i_, j_;
};

/// Lifts each coupled pair (i,j) to a triple (i, m, j) where m minimizes the
/// slack; the lowest index wins ties.
inline GeodesicPlan build_geodesic_plan(const FiniteMetricMeasureSpace& space, const Coupling& coupling, double s,
                                        double tol) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("build_geodesic_plan: s must lie in (0,1)");
  GeodesicPlan plan;
  plan.s = s;
  plan.tol = tol;
  plan.source = coupling.source;
  plan.target = coupling.target;
  std::vector<double> mid_mass(static_cast<std::size_t>(space.size()), 0.0);
  const Index n = space.size();
  for (const auto& e : coupling.entries) {
    const double d = space.dist(e.i, e.j);
    const double* di = space.dist.col(e.i).data();
    const double* dj = space.dist.col(e.j).data();
    const double a = s * d;
    const double b = (1.0 - s) * d;
    Index best = 0;
    double best_slack = HUGE_VAL;
    for (Index k = 0; k < n; ++k) {
      const double slack = std::abs(di[k] - a) + std::abs(dj[k] - b);
      if (slack < best_slack) {
        best_slack = slack;
        best = k;
      }
    }
    if (best_slack > tol) throw CoarseGridError(e.i, e.j, best_slack, tol);
    plan.triples.push_back({e.i, best, e.j, e.w, best_slack});
    plan.max_slack = std::max(plan.max_slack, best_slack);
    mid_mass[static_cast<std::size_t>(best)] += e.w;
  }
  plan.intermediate = make_probability(space, std::move(mid_mass));
  return plan;
}

/// One coupled pair whose intermediate point is an apex or pole.
struct ApexRoute {
  Index i;
  Index j;
  Index apex;
  double w;
  std::optional<Index> base_i, base_j;
  double r_i = 0.0, r_j = 0.0;
};

struct ApexScanReport {
  double apex_mass = 0.0;        // weight of triples whose midpoint is an apex/pole
  double degenerate_mass = 0.0;  // part of it with both endpoints at that same apex
  std::vector<ApexRoute> routes;
  /// Common antipodal base pair (phi_0, phi_1) of all routes, when there is one.
  std::optional<std::pair<Index, Index>> base_pair;
  /// Radius relation error: Euclidean |r_1 - r_0|; spherical through S
  /// |r_1 - (1-s)/s r_0|, through N the same on pi - r.
  double max_radius_error = 0.0;
  std::vector<double> radius_ratios;  // r_1/r_0 (pi - r measured from N)
  std::vector<std::string> violations;

  bool pattern_ok() const { return violations.empty(); }
};

/// Mass of the plan routed through the apex (Euclidean) or the poles
/// (spherical), and whether those routes follow the unique-antipodal-pair
/// pattern: a single base pair (phi_0, phi_1) of antipodes with radii
/// (r, r) on the Euclidean cone and (r, (1-s)/s r) on the spherical one.
inline ApexScanReport apex_scan(const GeodesicPlan& plan, const ConeGrid& grid, double eps,
                                double pattern_tol = 1e-9) {
  constexpr double pi = std::numbers::pi;
  ApexScanReport rep;
  const double s = plan.s;
  for (const auto& t : plan.triples) {
    if (!grid.is_apex(t.mid, eps)) continue;
    rep.apex_mass += t.w;
    if (grid.is_apex(t.i, eps) && grid.is_apex(t.j, eps) && grid.space.dist(t.i, t.mid) <= eps &&
        grid.space.dist(t.j, t.mid) <= eps) {
      rep.degenerate_mass += t.w;
      continue;
    }
    const auto& p0 = grid.point(t.i);
    const auto& p1 = grid.point(t.j);
    ApexRoute r{t.i, t.j, t.mid, t.w, p0.base, p1.base, p0.radial, p1.radial};
    rep.routes.push_back(r);
    const std::string tag = "route (" + std::to_string(t.i) + "," + std::to_string(t.j) + ")";
    if (!p0.base || !p1.base) {
      rep.violations.push_back(tag + ": endpoint at an apex");
      continue;
    }
    const double bd = grid.base.dist(*p0.base, *p1.base);
    if (bd < pi - pattern_tol) rep.violations.push_back(tag + ": base points are not antipodal");
    const auto bp = std::make_pair(*p0.base, *p1.base);
    if (!rep.base_pair)
      rep.base_pair = bp;
    else if (*rep.base_pair != bp)
      rep.violations.push_back(tag + ": second antipodal base pair");
    double err = 0.0;
    if (grid.kind == ConeKind::euclidean) {
      err = std::abs(p1.radial - p0.radial);
      rep.radius_ratios.push_back(p1.radial / p0.radial);
    } else {
      const bool north = grid.point(t.mid).radial > 0.5 * pi;
      const double r0 = north ? pi - p0.radial : p0.radial;
      const double r1 = north ? pi - p1.radial : p1.radial;
      err = std::abs(r1 - (1.0 - s) / s * r0);
      rep.radius_ratios.push_back(r1 / r0);
    }
    rep.max_radius_error = std::max(rep.max_radius_error, err);
    if (err > pattern_tol) rep.violations.push_back(tag + ": radii do not match the apex-route relation");
  }
  return rep;
}

struct RestrictedMarginals {
  double kept_mass = 0.0;
  ProbabilityVector source;
  ProbabilityVector intermediate;
  ProbabilityVector target;
  /// Total variation distance of each renormalized marginal to the unrestricted one.
  double tv_source = 0.0, tv_intermediate = 0.0, tv_target = 0.0;
};

/// Drops triples touching the eps-ball around any apex/pole, renormalizes
/// and compares the marginals with the unrestricted ones.
inline RestrictedMarginals restrict_away_from_apex(const GeodesicPlan& plan, const ConeGrid& grid, double eps) {
  const auto n = static_cast<std::size_t>(grid.space.size());
  std::vector<double> m0(n, 0.0), ms(n, 0.0), m1(n, 0.0), f0(n, 0.0), fs(n, 0.0), f1(n, 0.0);
  auto near_apex = [&](Index k) {
    for (Index a : grid.apex_indices())
      if (grid.space.dist(k, a) <= eps) return true;
    return false;
  };
  RestrictedMarginals out;
  for (const auto& t : plan.triples) {
    f0[static_cast<std::size_t>(t.i)] += t.w;
    fs[static_cast<std::size_t>(t.mid)] += t.w;
    f1[static_cast<std::size_t>(t.j)] += t.w;
    if (near_apex(t.i) || near_apex(t.mid) || near_apex(t.j)) continue;
    out.kept_mass += t.w;
    m0[static_cast<std::size_t>(t.i)] += t.w;
    ms[static_cast<std::size_t>(t.mid)] += t.w;
    m1[static_cast<std::size_t>(t.j)] += t.w;
  }
  if (!(out.kept_mass > 0.0)) throw ValidationError("restrict_away_from_apex: every triple touches the apex ball");
  auto finish = [&](std::vector<double>& m, const std::vector<double>& full, double& tv) {
    double total = 0.0;
    for (double x : full) total += x;
    for (std::size_t k = 0; k < n; ++k) m[k] /= out.kept_mass;
    tv = 0.0;
    for (std::size_t k = 0; k < n; ++k) tv += std::abs(m[k] - full[k] / total);
    tv *= 0.5;
    return make_probability(grid.space, m);
  };
  out.source = finish(m0, f0, out.tv_source);
  out.intermediate = finish(ms, fs, out.tv_intermediate);
  out.target = finish(m1, f1, out.tv_target);
  return out;
}

}  // namespace conecd
