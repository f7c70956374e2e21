#pragma once

// Renyi entropies and direct evaluation of the curvature-dimension
// inequality, in the tau (full) and sigma (reduced) forms, along three-point
// plans. Batch verification over seeded random measure pairs.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "conecd/coeffs.hpp"
#include "conecd/cones.hpp"
#include "conecd/error.hpp"
#include "conecd/geodesic.hpp"
#include "conecd/measures.hpp"
#include "conecd/mms.hpp"
#include "conecd/transport.hpp"

namespace conecd {

/// -sum over supp(m) of rho^(1-1/N') w, rho = mass/weight. Points without
/// mass contribute 0 (also at N' = 1), points of weight 0 contribute 0.
inline double renyi_entropy(const ProbabilityVector& mu, const FiniteMetricMeasureSpace& space, double Nprime) {
  if (!(Nprime >= 1.0)) throw DomainError("renyi_entropy: Nprime must be >= 1");
  if (mu.size() != space.size()) throw ValidationError("renyi_entropy: dimension mismatch");
  const double e = 1.0 - 1.0 / Nprime;
  double s = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    const double w = space.w(i);
    const double m = mu[i];
    if (w > 0.0 && m > 0.0) s += std::pow(m / w, e) * w;
  }
  return -s;
}

enum class CdVerdict { pass, fail, infinite_rhs };

inline const char* to_string(CdVerdict v) {
  switch (v) {
    case CdVerdict::pass: return "pass";
    case CdVerdict::fail: return "fail";
    case CdVerdict::infinite_rhs: return "infinite-rhs";
  }
  return "?";
}

/// An infinite coefficient makes the right-hand side -infinity, so the
/// inequality cannot hold: infinite_rhs counts as a failure.
inline bool is_failure(CdVerdict v) { return v != CdVerdict::pass; }

struct CdReport {
  std::int64_t trial = 0;
  double K = 0.0;
  double Nprime = 0.0;
  double t = 0.0;
  bool reduced = false;
  double lhs = 0.0;
  double rhs = 0.0;      // -inf when some coupled pair has an infinite coefficient
  double deficit = 0.0;  // rhs - lhs
  double slack = 0.0;    // max plan slack
  double eps = 0.0;
  CdVerdict verdict = CdVerdict::pass;
  bool infinite_rhs = false;
};

/// Evaluates S_N'(mu_t) <= -sum w [c^(1-t)(d) rho_0^(-1/N')(x_0) + c^(t)(d) rho_1^(-1/N')(x_1)]
/// with c = tau (full) or sigma (reduced), along `plan` (whose fraction must be t).
inline CdReport cd_inequality_check(const ProbabilityVector& mu0, const ProbabilityVector& mu1, const GeodesicPlan& plan,
                                    const FiniteMetricMeasureSpace& space, double K, double Nprime, bool reduced,
                                    double t, double eps) {
  if (!mu0.fully_ac() || !mu1.fully_ac()) throw ValidationError("cd_inequality_check: singular input measure");
  if (std::abs(plan.s - t) > 1e-12) throw DomainError("cd_inequality_check: plan fraction differs from t");
  if (!(Nprime >= 1.0)) throw DomainError("cd_inequality_check: Nprime must be >= 1");
  if (mu0.size() != space.size() || mu1.size() != space.size())
    throw ValidationError("cd_inequality_check: dimension mismatch");
  CdReport r;
  r.K = K;
  r.Nprime = Nprime;
  r.t = t;
  r.reduced = reduced;
  r.slack = plan.max_slack;
  r.eps = eps;
  r.lhs = renyi_entropy(plan.intermediate, space, Nprime);

  auto coefficient = [&](double frac, double theta) {
    const DistortionParams p{K, Nprime, frac, theta};
    return reduced ? sigma(p) : tau(p);
  };
  double sum = 0.0;
  for (const auto& tr : plan.triples) {
    if (!(tr.w > 0.0)) continue;
    const double d = space.dist(tr.i, tr.j);
    const auto c0 = coefficient(1.0 - t, d);
    const auto c1 = coefficient(t, d);
    if (c0.is_infinite() || c1.is_infinite()) {
      r.infinite_rhs = true;
      continue;
    }
    const double rho0 = mu0.density(space, tr.i);
    const double rho1 = mu1.density(space, tr.j);
    sum += tr.w * (c0.value() * std::pow(rho0, -1.0 / Nprime) + c1.value() * std::pow(rho1, -1.0 / Nprime));
  }
  if (r.infinite_rhs) {
    r.rhs = -HUGE_VAL;
    r.deficit = -HUGE_VAL;
    r.verdict = CdVerdict::infinite_rhs;
  } else {
    r.rhs = -sum;
    r.deficit = r.rhs - r.lhs;
    r.verdict = r.deficit >= -eps ? CdVerdict::pass : CdVerdict::fail;
  }
  return r;
}

/// Dimensions tried for a nominal N: {N, N+1, 2N} without repeats.
inline std::vector<double> nprime_set(double N) {
  std::vector<double> out{N, N + 1.0, 2.0 * N};
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct CdVerifyOptions {
  std::vector<double> t_list{0.25, 0.5, 0.75};
  /// Empty: nprime_set(N).
  std::vector<double> nprimes;
  /// <= 0: 5 x max grid spacing.
  double eps = 0.0;
  /// <= 0: 2 x max grid spacing.
  double plan_tol = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  BlobOptions blobs{};
};

struct CdVerifySummary {
  double K = 0.0;
  double N = 0.0;
  std::vector<double> nprimes;
  std::vector<double> t_list;
  double eps = 0.0;
  double plan_tol = 0.0;
  std::int64_t trials = 0;
  /// Full and reduced reports, ordered by (trial, t, N', full before reduced).
  std::vector<CdReport> reports;
  double min_deficit = HUGE_VAL;          // over full reports
  double min_deficit_reduced = HUGE_VAL;  // over reduced reports
  double max_slack = 0.0;
  std::int64_t passed = 0, failed = 0, infinite = 0;
  /// Report pairs with rhs_reduced < rhs_full (K >= 0), or unequal at K = 0.
  std::int64_t ordering_violations = 0;
  std::int64_t k0_mismatches = 0;
  /// First failing report, if any.
  std::int64_t first_failure = -1;

  bool all_pass() const { return failed == 0 && infinite == 0; }
};

namespace detail {

inline bool ordering_holds(const CdReport& full, const CdReport& red) {
  if (full.infinite_rhs) return true;  // -inf is below everything
  if (red.infinite_rhs) return false;
  return red.rhs >= full.rhs - 1e-12 * std::max(1.0, std::abs(full.rhs));
}

inline void accumulate(CdVerifySummary& s, const CdReport& full, const CdReport& red) {
  for (const CdReport* r : {&full, &red}) {
    s.max_slack = std::max(s.max_slack, r->slack);
    auto& target = r->reduced ? s.min_deficit_reduced : s.min_deficit;
    target = std::min(target, r->deficit);
    switch (r->verdict) {
      case CdVerdict::pass: ++s.passed; break;
      case CdVerdict::fail: ++s.failed; break;
      case CdVerdict::infinite_rhs: ++s.infinite; break;
    }
    if (is_failure(r->verdict) && s.first_failure < 0) s.first_failure = static_cast<std::int64_t>(s.reports.size());
    s.reports.push_back(*r);
  }
  if (full.K >= 0.0 && !ordering_holds(full, red)) ++s.ordering_violations;
  if (full.K == 0.0 && (full.rhs != red.rhs || full.lhs != red.lhs)) ++s.k0_mismatches;
}

}  // namespace detail

/// Full and reduced reports for one measure pair, for every t and N'.
inline std::vector<CdReport> cd_check_pair(const FiniteMetricMeasureSpace& space, const ProbabilityVector& mu0,
                                           const ProbabilityVector& mu1, double K, const std::vector<double>& nprimes,
                                           const std::vector<double>& t_list, double eps, double plan_tol,
                                           std::int64_t trial = 0) {
  std::vector<CdReport> out;
  const auto q = solve_ot(space, mu0, mu1);
  for (double t : t_list) {
    GeodesicPlan plan;
    try {
      plan = build_geodesic_plan(space, q, t, plan_tol);
    } catch (const CoarseGridError& e) {
      throw ValidationError("trial " + std::to_string(trial) + ": " + e.what());
    }
    for (double np : nprimes)
      for (bool reduced : {false, true}) {
        auto r = cd_inequality_check(mu0, mu1, plan, space, K, np, reduced, t, eps);
        r.trial = trial;
        out.push_back(r);
      }
  }
  return out;
}

/// Aggregates reports produced by cd_check_pair (full/reduced pairs adjacent).
inline void add_reports(CdVerifySummary& s, const std::vector<CdReport>& reports) {
  for (std::size_t k = 0; k + 1 < reports.size(); k += 2) detail::accumulate(s, reports[k], reports[k + 1]);
}

inline CdVerifySummary make_summary(const ConeGrid& grid, double K, double N, std::int64_t trials,
                                    const CdVerifyOptions& opt) {
  CdVerifySummary s;
  s.K = K;
  s.N = N;
  s.nprimes = opt.nprimes.empty() ? nprime_set(N) : opt.nprimes;
  s.t_list = opt.t_list;
  s.eps = opt.eps > 0.0 ? opt.eps : 5.0 * grid.max_spacing();
  s.plan_tol = opt.plan_tol > 0.0 ? opt.plan_tol : 2.0 * grid.max_spacing();
  s.trials = trials;
  return s;
}

/// Runs `trials` seeded generic pairs through transport, plans and the
/// inequality. Trials run on up to opt.jobs threads; results are ordered by
/// trial index, so the summary does not depend on the thread count.
inline CdVerifySummary cd_verify(const ConeGrid& grid, double K, double N, std::int64_t trials,
                                 const CdVerifyOptions& opt = {}) {
  if (trials < 0) throw DomainError("cd_verify: trials must be >= 0");
  for (double t : opt.t_list)
    if (!(t > 0.0 && t < 1.0)) throw DomainError("cd_verify: every t must lie in (0,1)");
  auto s = make_summary(grid, K, N, trials, opt);
  if (trials == 0) return s;

  std::vector<std::vector<CdReport>> per_trial(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t k = next++; k < trials; k = next++) {
      try {
        auto [mu0, mu1] = generic_pair(grid, opt.seed, static_cast<std::uint64_t>(k), opt.blobs);
        per_trial[static_cast<std::size_t>(k)] =
            cd_check_pair(grid.space, mu0, mu1, K, s.nprimes, s.t_list, s.eps, s.plan_tol, k);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(trials)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& r : per_trial) add_reports(s, r);
  return s;
}

/// diam <= pi sqrt((N-1)/K) for K > 0; vacuously true for K <= 0.
inline bool bonnet_myers_check(const FiniteMetricMeasureSpace& space, double K, double N) {
  if (!(K > 0.0)) return true;
  if (!(N >= 1.0)) throw DomainError("bonnet_myers_check: N must be >= 1");
  return diameter(space) <= std::numbers::pi * std::sqrt((N - 1.0) / K) + 1e-9;
}

}  // namespace conecd
