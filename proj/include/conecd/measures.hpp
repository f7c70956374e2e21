#pragma once

// Seeded probability measures on cone grids: smoothed blob mixtures and the
// named scenarios used by the checks (generic blobs, antipodal Diracs,
// near-antipodal blobs).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "conecd/cones.hpp"
#include "conecd/error.hpp"
#include "conecd/mms.hpp"

namespace conecd {

/// Independent RNG stream for (seed, stream index).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x636f6e65u};
  return std::mt19937_64(seq);
}

struct BlobOptions {
  int min_blobs = 2;
  int max_blobs = 4;
  /// Blob radii are drawn from [radius_min, radius_max] x grid.max_spacing().
  double radius_min = 2.0;
  double radius_max = 5.0;
  /// Radial cells next to the apex (and, on spherical cones, next to the
  /// north pole) that never carry mass.
  Index mask_cells = 4;
  /// Supports stay within this base distance of a per-pair random base point.
  /// Below pi/2 this keeps every coupled pair inside an open half-space, so
  /// Euclidean geodesics stay at distance >= r_min cos(region) from the apex.
  double region_base_radius = std::numbers::pi / 3.0;
};

/// Points of the grid that may carry mass for one measure pair.
struct SupportRegion {
  std::vector<char> allowed;
  std::vector<Index> points;
};

namespace detail {

/// Base neighbours: points at the nearest positive distance (up to rounding).
inline std::vector<std::vector<Index>> base_neighbours(const FiniteMetricMeasureSpace& base) {
  std::vector<std::vector<Index>> nb(static_cast<std::size_t>(base.size()));
  for (Index i = 0; i < base.size(); ++i) {
    double nn = HUGE_VAL;
    for (Index j = 0; j < base.size(); ++j)
      if (j != i && base.dist(i, j) > 0.0) nn = std::min(nn, base.dist(i, j));
    for (Index j = 0; j < base.size(); ++j)
      if (j != i && base.dist(i, j) <= nn * (1.0 + 1e-9)) nb[static_cast<std::size_t>(i)].push_back(j);
  }
  return nb;
}

}  // namespace detail

/// Random support region: radial cells away from the singular points and base
/// points within region_base_radius of a random base centre.
inline SupportRegion random_region(const ConeGrid& grid, std::mt19937_64& rng, const BlobOptions& opt) {
  const auto m = static_cast<Index>(grid.radial_grid.size());
  const Index lo = std::min(opt.mask_cells, m);
  const Index hi = grid.kind == ConeKind::spherical ? m - opt.mask_cells : m;
  if (lo >= hi || grid.base.size() == 0) throw DomainError("random_region: grid too small for the mask");
  const Index centre = std::uniform_int_distribution<Index>(0, grid.base.size() - 1)(rng);
  SupportRegion r;
  r.allowed.assign(static_cast<std::size_t>(grid.space.size()), 0);
  for (Index k = lo; k < hi; ++k)
    for (Index b = 0; b < grid.base.size(); ++b) {
      if (grid.base.dist(centre, b) > opt.region_base_radius || !grid.base.in_support(b)) continue;
      const Index i = grid.index_of(b, k);
      r.allowed[static_cast<std::size_t>(i)] = 1;
      r.points.push_back(i);
    }
  if (r.points.empty()) throw DomainError("random_region: empty region");
  return r;
}

/// One step of weighted neighbour averaging of a density inside the region.
inline std::vector<double> smooth_density(const ConeGrid& grid, const SupportRegion& region,
                                          const std::vector<double>& rho) {
  const auto nb = detail::base_neighbours(grid.base);
  const auto m = static_cast<Index>(grid.radial_grid.size());
  std::vector<double> out(rho.size(), 0.0);
  for (Index i : region.points) {
    const auto& p = grid.point(i);
    const Index b = *p.base;
    const Index k = *p.radial_index;
    double num = 0.0, den = 0.0;
    auto visit = [&](Index bb, Index kk) {
      if (kk < 0 || kk >= m) return;
      const Index j = grid.index_of(bb, kk);
      if (!region.allowed[static_cast<std::size_t>(j)]) return;
      num += grid.space.w(j) * rho[static_cast<std::size_t>(j)];
      den += grid.space.w(j);
    };
    for (Index dk = -1; dk <= 1; ++dk) {
      visit(b, k + dk);
      for (Index bb : nb[static_cast<std::size_t>(b)]) visit(bb, k + dk);
    }
    out[static_cast<std::size_t>(i)] = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

/// Turns a density on the grid into a probability vector (mass = rho * weight).
inline ProbabilityVector density_to_probability(const ConeGrid& grid, const std::vector<double>& rho) {
  std::vector<double> mass(rho.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    mass[i] = rho[i] * grid.space.weight[i];
    total += mass[i];
  }
  if (!(total > 0.0)) throw DomainError("density_to_probability: zero mass");
  for (double& x : mass) x /= total;
  return make_probability(grid.space, std::move(mass));
}

/// Mixture of 2-4 uniform densities on cone balls intersected with the
/// region, smoothed once. Every point of the region gets positive mass only if
/// covered by a blob or its smoothing halo; nothing lands outside the region.
inline ProbabilityVector random_blob_measure(const ConeGrid& grid, const SupportRegion& region, std::mt19937_64& rng,
                                             const BlobOptions& opt = {}) {
  const double h = grid.max_spacing();
  const int blobs = std::uniform_int_distribution<int>(opt.min_blobs, opt.max_blobs)(rng);
  std::vector<double> rho(static_cast<std::size_t>(grid.space.size()), 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, region.points.size() - 1);
  std::uniform_real_distribution<double> radius(opt.radius_min * h, opt.radius_max * h);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  for (int b = 0; b < blobs; ++b) {
    const Index centre = region.points[pick(rng)];
    const double r = radius(rng);
    const double wgt = weight(rng);
    double ball_mass = 0.0;
    for (Index i : region.points)
      if (grid.space.dist(centre, i) <= r) ball_mass += grid.space.w(i);
    for (Index i : region.points)
      if (grid.space.dist(centre, i) <= r) rho[static_cast<std::size_t>(i)] += wgt / ball_mass;
  }
  return density_to_probability(grid, smooth_density(grid, region, rho));
}

/// Seeded generic pair for trial `trial`: both measures share one region.
inline std::pair<ProbabilityVector, ProbabilityVector> generic_pair(const ConeGrid& grid, std::uint64_t seed,
                                                                    std::uint64_t trial, const BlobOptions& opt = {}) {
  auto rng = make_rng(seed, trial);
  const auto region = random_region(grid, rng, opt);
  auto mu0 = random_blob_measure(grid, region, rng, opt);
  auto mu1 = random_blob_measure(grid, region, rng, opt);
  return {std::move(mu0), std::move(mu1)};
}

/// First base point at distance pi from b (exact antipode), if any.
inline std::optional<Index> base_antipode(const FiniteMetricMeasureSpace& base, Index b, double tol = 1e-12) {
  for (Index j = 0; j < base.size(); ++j)
    if (base.in_support(j) && base.dist(b, j) >= std::numbers::pi - tol) return j;
  return std::nullopt;
}

struct DiracPreset {
  ProbabilityVector mu0;
  ProbabilityVector mu1;
  Index from;
  Index to;
};

/// Diracs at (phi_0, r_0) and (phi_1, r_1) with phi_1 the antipode of
/// phi_0. Euclidean: r_0 = r_1 = middle radius. Spherical: r_1 = (1-s)/s r_0
/// on the grid with r_0 + r_1 < pi, so the s-intermediate point is the south pole.
inline DiracPreset antipodal_dirac(const ConeGrid& grid, double s = 0.5, Index base_point = 0) {
  const auto anti = base_antipode(grid.base, base_point);
  if (!anti) throw DomainError("antipodal_dirac: base point has no antipode");
  const auto m = static_cast<Index>(grid.radial_grid.size());
  if (m == 0) throw DomainError("antipodal_dirac: empty radial grid");
  Index k0 = -1, k1 = -1;
  if (grid.kind == ConeKind::euclidean) {
    k0 = k1 = m / 2;
  } else {
    const double ratio = (1.0 - s) / s;
    // Largest r_0 admitting a grid radius r_1 = ratio r_0 with r_0 + r_1 < pi.
    for (Index k = m - 1; k >= 0; --k) {
      const double target = ratio * grid.radial_grid[static_cast<std::size_t>(k)];
      bool found = false;
      for (Index l = 0; l < m; ++l)
        if (std::abs(grid.radial_grid[static_cast<std::size_t>(l)] - target) <= 1e-12 * std::max(1.0, target) &&
            grid.radial_grid[static_cast<std::size_t>(k)] + target < std::numbers::pi) {
          k0 = k;
          k1 = l;
          found = true;
          break;
        }
      if (found) break;
    }
    if (k0 < 0) throw DomainError("antipodal_dirac: no radial pair with ratio (1-s)/s on this grid");
  }
  const Index from = grid.index_of(base_point, k0);
  const Index to = grid.index_of(*anti, k1);
  return {dirac(grid.space, from), dirac(grid.space, to), from, to};
}

/// Normalized ambient measure on the 3x3 patch (base neighbours x radial
/// neighbours) around (b, k).
inline ProbabilityVector patch_measure(const ConeGrid& grid, Index b, Index k) {
  const auto nb = detail::base_neighbours(grid.base);
  const auto m = static_cast<Index>(grid.radial_grid.size());
  std::vector<Index> pts;
  for (Index dk = -1; dk <= 1; ++dk) {
    const Index kk = k + dk;
    if (kk < 0 || kk >= m) continue;
    pts.push_back(grid.index_of(b, kk));
    for (Index bb : nb[static_cast<std::size_t>(b)]) pts.push_back(grid.index_of(bb, kk));
  }
  return normalized_restriction(grid.space, pts);
}

/// Small patches around (phi, r_mid) and (antipode(phi), r_mid), with r_mid
/// the radius nearest pi/2 (spherical) or the middle radius (Euclidean).
/// On a spherical cone the coupled pairs sit near distance pi.
inline std::pair<ProbabilityVector, ProbabilityVector> near_antipodal(const ConeGrid& grid, Index base_point = 0) {
  const auto anti = base_antipode(grid.base, base_point);
  if (!anti) throw DomainError("near_antipodal: base point has no antipode");
  const auto m = static_cast<Index>(grid.radial_grid.size());
  if (m == 0) throw DomainError("near_antipodal: empty radial grid");
  Index k = m / 2;
  if (grid.kind == ConeKind::spherical) {
    for (Index l = 0; l < m; ++l)
      if (std::abs(grid.radial_grid[static_cast<std::size_t>(l)] - 0.5 * std::numbers::pi) <
          std::abs(grid.radial_grid[static_cast<std::size_t>(k)] - 0.5 * std::numbers::pi))
        k = l;
  }
  return {patch_measure(grid, base_point, k), patch_measure(grid, *anti, k)};
}

}  // namespace conecd
