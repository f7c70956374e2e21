#pragma once

// Euclidean and spherical cones over a finite metric measure space.
//
//   Euclidean:  d((x,s),(y,t))^2 = s^2 + t^2 - 2 s t cos d(x,y),  measure dm(x) s^N ds
//   Spherical:  cos d((x,s),(y,t)) = cos s cos t + sin s sin t cos d(x,y),
//               measure dm(x) sin^N(s) ds,  s in [0,pi]
//
// The apex O (Euclidean) and the poles S (s = 0), N (s = pi) are single points.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conecd/error.hpp"
#include "conecd/mms.hpp"

namespace conecd {

inline constexpr double kBaseDiameterSlack = 1e-9;

enum class ConeKind { euclidean, spherical };

inline const char* to_string(ConeKind k) { return k == ConeKind::euclidean ? "euclidean" : "spherical"; }

inline ConeKind parse_cone_kind(const std::string& s) {
  if (s == "euclidean") return ConeKind::euclidean;
  if (s == "spherical") return ConeKind::spherical;
  throw DomainError("unknown cone kind '" + s + "'");
}

/// (base point, radial coordinate). `base` is empty at the apex and at the poles.
struct ConePoint {
  std::optional<Index> base;
  double radial = 0.0;
  std::optional<Index> radial_index;  // position in the radial grid, empty at apex/poles

  bool is_apex() const { return !base.has_value(); }
};

namespace detail {

inline double clamp_base_distance(double base_d) {
  if (!(base_d >= 0.0)) throw DomainError("cone distance: negative base distance");
  if (base_d > std::numbers::pi + kBaseDiameterSlack) throw DomainError("cone distance: base distance exceeds pi");
  return std::min(base_d, std::numbers::pi);
}

}  // namespace detail

inline double eucl_cone_dist(double s, double t, double base_d) {
  if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("eucl_cone_dist: negative radius");
  const double d = detail::clamp_base_distance(base_d);
  // Written as (s-t)^2 + 2st(1-cos d) = (s-t)^2 + 4st sin^2(d/2) to avoid
  // cancellation for nearby points.
  const double h = std::sin(0.5 * d);
  const double sq = (s - t) * (s - t) + 4.0 * s * t * h * h;
  return std::sqrt(std::max(sq, 0.0));
}

inline double sph_cone_dist(double s, double t, double base_d) {
  constexpr double pi = std::numbers::pi;
  if (!(s >= 0.0 && s <= pi) || !(t >= 0.0 && t <= pi)) throw DomainError("sph_cone_dist: radius outside [0,pi]");
  const double d = detail::clamp_base_distance(base_d);
  // Half-angle forms of the spherical cosine law:
  //   sin^2(D/2) = sin^2((s-t)/2) + sin s sin t sin^2(d/2)
  //   cos^2(D/2) = cos^2((s+t)/2) + sin s sin t cos^2(d/2)
  // Both sums have nonnegative terms, so atan2 keeps full accuracy at D near 0 and pi.
  const double st = std::sin(s) * std::sin(t);
  const double a = std::sin(0.5 * (s - t)), c = std::cos(0.5 * (s + t));
  const double hs = std::sin(0.5 * d), hc = std::cos(0.5 * d);
  return 2.0 * std::atan2(std::sqrt(a * a + st * hs * hs), std::sqrt(c * c + st * hc * hc));
}

/// Ricci curvature of the punctured Euclidean cone in direction v + lambda d/dr,
/// from the base Ricci curvature Ric_M(v,v) and |v|^2.
inline double cone_ricci(double ric_vv, double v_norm2, double /*lambda*/, int n) {
  if (v_norm2 < 0.0) throw DomainError("cone_ricci: negative |v|^2");
  if (n < 1) throw DomainError("cone_ricci: n < 1");
  return ric_vv - static_cast<double>(n - 1) * v_norm2;
}

struct SphericalRicci {
  double ricci;
  double norm2;  // |v + lambda d/dr|^2 in the cone metric
};

/// Ricci curvature and squared norm of v + lambda d/dr on the punctured
/// spherical cone at radial coordinate r.
inline SphericalRicci sph_cone_ricci(double ric_vv, double v_norm2, double lambda, double r, int n) {
  if (!(r > 0.0 && r < std::numbers::pi)) throw DomainError("sph_cone_ricci: r outside (0,pi), poles are singular");
  if (v_norm2 < 0.0) throw DomainError("sph_cone_ricci: negative |v|^2");
  if (n < 1) throw DomainError("sph_cone_ricci: n < 1");
  const double c = std::cos(r);
  const double s = std::sin(r);
  const double nd = static_cast<double>(n);
  return {ric_vv + (1.0 - nd * c * c) * v_norm2 + nd * lambda * lambda, lambda * lambda + s * s * v_norm2};
}

/// Integral of s^N over [a,b].
inline double radial_mass_euclidean(double a, double b, double N) {
  return (std::pow(b, N + 1.0) - std::pow(a, N + 1.0)) / (N + 1.0);
}

/// Integral of sin^N s over [a,b] by 64-point Gauss-Legendre.
inline double radial_mass_spherical(double a, double b, double N) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss<double, 64>::integrate(
      [N](double s) { return std::pow(std::max(std::sin(s), 0.0), N); }, a, b);
}

/// A discretized cone: the product grid base x radial_grid plus apex or poles,
/// stored as a dense metric measure space.
struct ConeGrid {
  ConeKind kind = ConeKind::euclidean;
  double N = 1.0;
  std::vector<double> radial_grid;
  /// Cell boundaries: cell k of radial_grid[k] is [boundaries[k], boundaries[k+1]].
  std::vector<double> boundaries;
  FiniteMetricMeasureSpace base;
  std::string base_ref;
  std::vector<ConePoint> points;
  FiniteMetricMeasureSpace space;
  bool base_distance_clamped = false;

  /// Euclidean: {O}. Spherical: {S, N}. Always the first entries of `points`.
  std::vector<Index> apex_indices() const {
    return kind == ConeKind::euclidean ? std::vector<Index>{0} : std::vector<Index>{0, 1};
  }

  Index apex_count() const { return kind == ConeKind::euclidean ? 1 : 2; }

  /// Index of (base point b, radial index k).
  Index index_of(Index b, Index k) const { return apex_count() + k * base.size() + b; }

  const ConePoint& point(Index i) const { return points[static_cast<std::size_t>(i)]; }

  /// Distance from the apex/pole set, i.e. how far a point is from the singular set.
  bool is_apex(Index i, double eps = 0.0) const {
    const auto& p = point(i);
    if (p.is_apex()) return true;
    if (p.radial <= eps) return true;
    return kind == ConeKind::spherical && p.radial >= std::numbers::pi - eps;
  }

  /// Largest distance between neighbouring grid points: the largest radial gap
  /// (including the gap to the apex) or the largest base nearest-neighbour
  /// spacing scaled by the largest radial stretch factor.
  double max_spacing() const {
    double h = 0.0;
    double prev = 0.0;
    for (double r : radial_grid) {
      h = std::max(h, r - prev);
      prev = r;
    }
    if (kind == ConeKind::spherical && !radial_grid.empty()) h = std::max(h, std::numbers::pi - radial_grid.back());
    double base_nn = 0.0;
    for (Index i = 0; i < base.size(); ++i) {
      double nn = HUGE_VAL;
      for (Index j = 0; j < base.size(); ++j)
        if (j != i && base.dist(i, j) > 0.0) nn = std::min(nn, base.dist(i, j));
      if (nn < HUGE_VAL) base_nn = std::max(base_nn, nn);
    }
    double stretch = 0.0;
    for (double r : radial_grid) stretch = std::max(stretch, kind == ConeKind::euclidean ? r : std::sin(r));
    return std::max(h, base_nn * stretch);
  }

  /// Exact cone distance between two grid points from their coordinates.
  double closed_form_distance(Index i, Index j) const {
    const auto& p = point(i);
    const auto& q = point(j);
    const double bd = (p.base && q.base) ? base.dist(*p.base, *q.base) : 0.0;
    return kind == ConeKind::euclidean ? eucl_cone_dist(p.radial, q.radial, bd) : sph_cone_dist(p.radial, q.radial, bd);
  }
};

namespace detail {

inline void check_radial_grid(const std::vector<double>& grid, ConeKind kind) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) throw DomainError("radial grid: entries must be positive");
    if (kind == ConeKind::spherical && !(grid[k] < std::numbers::pi))
      throw DomainError("radial grid: spherical entries must lie in (0,pi)");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw DomainError("radial grid: must be strictly increasing");
  }
}

/// Rejects bases wider than pi (beyond rounding) and reports whether any
/// distance had to be clamped.
inline bool check_base_diameter(const FiniteMetricMeasureSpace& base) {
  bool clamped = false;
  for (Index i = 0; i < base.size(); ++i)
    for (Index j = i + 1; j < base.size(); ++j) {
      const double d = base.dist(i, j);
      if (d > std::numbers::pi + kBaseDiameterSlack)
        throw DomainError("cone base: diameter exceeds pi at pair (" + std::to_string(i) + "," + std::to_string(j) +
                          "), d = " + std::to_string(d));
      if (d > std::numbers::pi) clamped = true;
    }
  return clamped;
}

inline ConeGrid build_cone(const FiniteMetricMeasureSpace& base, std::vector<double> radial_grid, double N,
                           ConeKind kind, std::string base_ref) {
  constexpr double pi = std::numbers::pi;
  if (!(N >= 0.0)) throw DomainError("cone: measure exponent N must be >= 0");
  check_radial_grid(radial_grid, kind);
  ConeGrid g;
  g.kind = kind;
  g.N = N;
  g.base = base;
  g.base_ref = std::move(base_ref);
  g.base_distance_clamped = check_base_diameter(base);
  g.radial_grid = std::move(radial_grid);

  const auto m = g.radial_grid.size();
  g.boundaries.resize(m + 1);
  if (m > 0) {
    g.boundaries[0] = 0.5 * g.radial_grid[0];
    for (std::size_t k = 1; k < m; ++k) g.boundaries[k] = 0.5 * (g.radial_grid[k - 1] + g.radial_grid[k]);
    g.boundaries[m] = kind == ConeKind::euclidean ? g.radial_grid[m - 1] : 0.5 * (g.radial_grid[m - 1] + pi);
  }
  auto cell_mass = [&](double a, double b) {
    return kind == ConeKind::euclidean ? radial_mass_euclidean(a, b, N) : radial_mass_spherical(a, b, N);
  };

  const double base_total = base.total_mass();
  const Index nb = base.size();
  // Apex/poles first.
  g.points.push_back({std::nullopt, 0.0, std::nullopt});
  g.space.labels.push_back(kind == ConeKind::euclidean ? "O" : "S");
  const double first = m > 0 ? g.boundaries[0] : (kind == ConeKind::euclidean ? 0.0 : 0.5 * pi);
  g.space.weight.push_back(base_total * cell_mass(0.0, first));
  if (kind == ConeKind::spherical) {
    g.points.push_back({std::nullopt, pi, std::nullopt});
    g.space.labels.push_back("N");
    const double last = m > 0 ? g.boundaries[m] : 0.5 * pi;
    g.space.weight.push_back(base_total * cell_mass(last, pi));
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double cm = cell_mass(g.boundaries[k], g.boundaries[k + 1]);
    for (Index b = 0; b < nb; ++b) {
      g.points.push_back({b, g.radial_grid[k], static_cast<Index>(k)});
      g.space.labels.push_back(base.labels[static_cast<std::size_t>(b)] + "@" + std::to_string(k));
      g.space.weight.push_back(base.w(b) * cm);
    }
  }
  const Index n = static_cast<Index>(g.points.size());
  g.space.dist.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    g.space.dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d = g.closed_form_distance(i, j);
      g.space.dist(i, j) = d;
      g.space.dist(j, i) = d;
    }
  }
  return g;
}

}  // namespace detail

/// N-Euclidean cone over `base` sampled at the radii of `radial_grid`.
/// Radial cell k spans the midpoints to its neighbours; the apex takes
/// [0, r_0/2] and the outermost cell ends at the last radius.
inline ConeGrid build_eucl_cone(const FiniteMetricMeasureSpace& base, std::vector<double> radial_grid, double N,
                                std::string base_ref = {}) {
  return detail::build_cone(base, std::move(radial_grid), N, ConeKind::euclidean, std::move(base_ref));
}

/// N-spherical cone over `base`. The south pole takes [0, r_0/2], the north
/// pole [(r_last + pi)/2, pi].
inline ConeGrid build_sph_cone(const FiniteMetricMeasureSpace& base, std::vector<double> radial_grid, double N,
                               std::string base_ref = {}) {
  return detail::build_cone(base, std::move(radial_grid), N, ConeKind::spherical, std::move(base_ref));
}

/// `cells` equally spaced radii on (0, rmax].
inline std::vector<double> uniform_radial_grid(Index cells, double rmax) {
  std::vector<double> g;
  for (Index k = 1; k <= cells; ++k) g.push_back(rmax * static_cast<double>(k) / static_cast<double>(cells));
  return g;
}

/// `cells` equally spaced interior radii of (0, pi): k pi/(cells+1).
inline std::vector<double> spherical_radial_grid(Index cells) {
  std::vector<double> g;
  for (Index k = 1; k <= cells; ++k)
    g.push_back(std::numbers::pi * static_cast<double>(k) / static_cast<double>(cells + 1));
  return g;
}

}  // namespace conecd
