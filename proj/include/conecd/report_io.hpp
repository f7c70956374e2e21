#pragma once

// JSON and CSV forms of cone grids, couplings, plans and check reports.
// Non-finite numbers are written as the strings "inf" / "-inf".

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conecd/cdcheck.hpp"
#include "conecd/cones.hpp"
#include "conecd/geodesic.hpp"
#include "conecd/mms_io.hpp"
#include "conecd/spectral.hpp"
#include "conecd/transport.hpp"

namespace conecd {

inline json number_or_inf(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

/// mms form plus "metadata" {kind, N, radial_grid, base_ref, base} and
/// per-point cone coordinates {base, r, k} (null base/k at apexes).
inline json to_json(const ConeGrid& g) {
  json j = to_json(g.space);
  j["metadata"] = {{"kind", to_string(g.kind)},
                   {"N", g.N},
                   {"radial_grid", g.radial_grid},
                   {"base_ref", g.base_ref},
                   {"base", to_json(g.base)}};
  json pts = json::array();
  for (const auto& p : g.points)
    pts.push_back({{"base", p.base ? json(*p.base) : json(nullptr)},
                   {"r", p.radial},
                   {"k", p.radial_index ? json(*p.radial_index) : json(nullptr)}});
  j["points"] = std::move(pts);
  return j;
}

/// Rebuilds the grid from its metadata and checks it against the stored
/// weights and distances.
inline ConeGrid cone_grid_from_json(const json& j, double tol = 1e-9) {
  const json& meta = detail::field(j, "metadata");
  const auto kind = parse_cone_kind(detail::field(meta, "kind").get<std::string>());
  const double N = detail::number_at(detail::field(meta, "N"), "metadata.N");
  const json& rg = detail::field(meta, "radial_grid");
  if (!rg.is_array()) throw ParseError("metadata.radial_grid", "expected an array");
  std::vector<double> radial;
  for (std::size_t k = 0; k < rg.size(); ++k)
    radial.push_back(detail::number_at(rg[k], "metadata.radial_grid[" + std::to_string(k) + "]"));
  std::string ref;
  if (auto it = meta.find("base_ref"); it != meta.end() && it->is_string()) ref = it->get<std::string>();
  const auto base = space_from_json(detail::field(meta, "base"));
  auto g = detail::build_cone(base, std::move(radial), N, kind, ref);
  const auto stored = space_from_json(j, false);
  if (stored.size() != g.space.size()) throw ValidationError("cone grid file: point count does not match metadata");
  for (Index i = 0; i < stored.size(); ++i) {
    if (std::abs(stored.w(i) - g.space.w(i)) > tol * std::max(1.0, g.space.w(i)))
      throw ValidationError("cone grid file: weight " + std::to_string(i) + " does not match metadata");
    for (Index k = 0; k < stored.size(); ++k)
      if (std::abs(stored.dist(i, k) - g.space.dist(i, k)) > tol)
        throw ValidationError("cone grid file: dist[" + std::to_string(i) + "][" + std::to_string(k) +
                              "] does not match metadata");
  }
  return g;
}

inline json to_json(const ProbabilityVector& mu) {
  json j = json::array();
  for (Index i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) j.push_back({{"i", i}, {"w", mu[i]}});
  return j;
}

inline json to_json(const Coupling& q) {
  json e = json::array();
  for (const auto& x : q.entries) e.push_back({{"i", x.i}, {"j", x.j}, {"w", x.w}});
  return {{"cost", q.cost}, {"wasserstein", q.wasserstein()}, {"singular_input", q.singular_input}, {"entries", e}};
}

inline json to_json(const GeodesicPlan& p) {
  json e = json::array();
  for (const auto& t : p.triples)
    e.push_back({{"i", t.i}, {"mid", t.mid}, {"j", t.j}, {"w", t.w}, {"slack", t.slack}});
  return {{"s", p.s}, {"tol", p.tol}, {"max_slack", p.max_slack}, {"triples", e}};
}

inline json to_json(const ApexScanReport& r) {
  json routes = json::array();
  for (const auto& x : r.routes)
    routes.push_back({{"i", x.i},
                      {"j", x.j},
                      {"apex", x.apex},
                      {"w", x.w},
                      {"base_i", x.base_i ? json(*x.base_i) : json(nullptr)},
                      {"base_j", x.base_j ? json(*x.base_j) : json(nullptr)},
                      {"r_i", x.r_i},
                      {"r_j", x.r_j}});
  json bp = r.base_pair ? json::array({r.base_pair->first, r.base_pair->second}) : json(nullptr);
  return {{"apex_mass", r.apex_mass},
          {"degenerate_mass", r.degenerate_mass},
          {"routes", routes},
          {"base_pair", bp},
          {"max_radius_error", r.max_radius_error},
          {"radius_ratios", r.radius_ratios},
          {"violations", r.violations},
          {"pattern", r.pattern_ok() ? "PASS" : "FAIL"}};
}

inline json to_json(const CdReport& r) {
  return {{"trial", r.trial},
          {"t", r.t},
          {"Nprime", r.Nprime},
          {"K", r.K},
          {"reduced", r.reduced},
          {"lhs", number_or_inf(r.lhs)},
          {"rhs", number_or_inf(r.rhs)},
          {"deficit", number_or_inf(r.deficit)},
          {"slack", r.slack},
          {"eps", r.eps},
          {"verdict", to_string(r.verdict)}};
}

inline json to_json(const CdVerifySummary& s) {
  json reports = json::array();
  for (const auto& r : s.reports) reports.push_back(to_json(r));
  return {{"K", s.K},
          {"N", s.N},
          {"nprimes", s.nprimes},
          {"t_list", s.t_list},
          {"eps", s.eps},
          {"plan_tol", s.plan_tol},
          {"trials", s.trials},
          {"min_deficit", number_or_inf(s.min_deficit)},
          {"min_deficit_reduced", number_or_inf(s.min_deficit_reduced)},
          {"max_slack", s.max_slack},
          {"passed", s.passed},
          {"failed", s.failed},
          {"infinite_rhs", s.infinite},
          {"ordering_violations", s.ordering_violations},
          {"k0_mismatches", s.k0_mismatches},
          {"first_failure", s.first_failure >= 0 ? to_json(s.reports[static_cast<std::size_t>(s.first_failure)])
                                                 : json(nullptr)},
          {"verdict", s.all_pass() ? "PASS" : "FAIL"},
          {"reports", reports}};
}

/// CSV summary: trial,t,Nprime,K,lhs,rhs,deficit,slack,verdict (+ form).
inline std::string to_csv(const CdVerifySummary& s) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "trial,t,Nprime,K,lhs,rhs,deficit,slack,verdict,form\n";
  for (const auto& r : s.reports)
    os << r.trial << ',' << r.t << ',' << r.Nprime << ',' << r.K << ',' << r.lhs << ',' << r.rhs << ',' << r.deficit
       << ',' << r.slack << ',' << to_string(r.verdict) << ',' << (r.reduced ? "reduced" : "full") << '\n';
  return os.str();
}

inline json to_json(const GapReport& r) {
  return {{"gap", r.gap},
          {"bound", r.bound},
          {"n", r.n},
          {"bandwidth", r.bandwidth},
          {"calibration", r.calibration},
          {"tol_rel", r.tol_rel},
          {"verdict", r.pass ? "PASS" : "FAIL"}};
}

}  // namespace conecd
