#pragma once

// Exact optimal transport for the squared-distance cost on a finite metric
// space, plus a d^2-cyclical monotonicity certificate for coupling supports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "conecd/error.hpp"
#include "conecd/mms.hpp"
#include "conecd/network_simplex.hpp"

namespace conecd {

struct CouplingEntry {
  Index i;
  Index j;
  double w;
};

/// Sparse transport plan between two probability vectors on the same space.
/// Entries are sorted by (i, j) and all carry positive mass.
struct Coupling {
  std::vector<CouplingEntry> entries;
  std::vector<double> source;
  std::vector<double> target;
  double cost = 0.0;  // sum of w * d(i,j)^2
  bool singular_input = false;

  double wasserstein() const { return std::sqrt(std::max(cost, 0.0)); }

  std::vector<std::pair<Index, Index>> support() const {
    std::vector<std::pair<Index, Index>> s;
    s.reserve(entries.size());
    for (const auto& e : entries) s.emplace_back(e.i, e.j);
    return s;
  }
};

/// Masses are scaled by 2^50 and rounded before solving so that the simplex
/// pivots on exact integers; marginals of the result agree with the inputs to
/// about n * 2^-51.
inline constexpr double kTransportScale = 1125899906842624.0;  // 2^50

namespace detail {

inline std::vector<std::int64_t> scale_to_integers(const std::vector<double>& mass, const std::vector<Index>& idx) {
  std::vector<std::int64_t> out;
  out.reserve(idx.size());
  std::int64_t total = 0;
  std::size_t largest = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double m = mass[static_cast<std::size_t>(idx[k])];
    out.push_back(std::llround(m * kTransportScale));
    total += out.back();
    if (m > mass[static_cast<std::size_t>(idx[largest])]) largest = k;
  }
  // Put the rounding residue on the heaviest point so both sides sum to 2^50.
  out[largest] += static_cast<std::int64_t>(kTransportScale) - total;
  return out;
}

}  // namespace detail

/// Optimal coupling of mu0 and mu1 for the cost dist^2. The result is a
/// vertex of the transport polytope; ties are broken deterministically.
inline Coupling solve_ot(const FiniteMetricMeasureSpace& space, const ProbabilityVector& mu0,
                         const ProbabilityVector& mu1) {
  const Index n = space.size();
  if (mu0.size() != n || mu1.size() != n) throw ValidationError("solve_ot: dimension mismatch");
  double s0 = 0.0, s1 = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (!(mu0[i] >= 0.0) || !(mu1[i] >= 0.0)) throw ValidationError("solve_ot: negative mass");
    s0 += mu0[i];
    s1 += mu1[i];
  }
  const double tol = kProbabilityTolerance * std::max<double>(1.0, static_cast<double>(n));
  if (std::abs(s0 - s1) > tol || std::abs(s0 - 1.0) > tol) throw ValidationError("solve_ot: infeasible marginals");

  // Restrict to points whose mass survives the integer scaling.
  std::vector<Index> rows, cols;
  for (Index i = 0; i < n; ++i) {
    if (std::llround(mu0[i] * kTransportScale) > 0) rows.push_back(i);
    if (std::llround(mu1[i] * kTransportScale) > 0) cols.push_back(i);
  }
  auto supply = detail::scale_to_integers(mu0.mass, rows);
  auto demand = detail::scale_to_integers(mu1.mass, cols);
  std::vector<double> cost(rows.size() * cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double d = space.dist(rows[r], cols[c]);
      cost[r * cols.size() + c] = d * d;
    }

  Coupling q;
  q.source = mu0.mass;
  q.target = mu1.mass;
  q.singular_input = !mu0.fully_ac() || !mu1.fully_ac();

  detail::TransportSimplex simplex(std::move(supply), std::move(demand), std::move(cost));
  for (const auto& f : simplex.solve()) {
    const Index i = rows[static_cast<std::size_t>(f.row)];
    const Index j = cols[static_cast<std::size_t>(f.col)];
    const double w = static_cast<double>(f.flow) / kTransportScale;
    q.entries.push_back({i, j, w});
    q.cost += w * space.dist(i, j) * space.dist(i, j);
  }
  return q;
}

/// d_W(mu0, mu1).
inline double wasserstein(const FiniteMetricMeasureSpace& space, const ProbabilityVector& mu0,
                          const ProbabilityVector& mu1) {
  return solve_ot(space, mu0, mu1).wasserstein();
}

/// Checks row/column sums and the recorded cost of a coupling.
inline bool coupling_consistent(const FiniteMetricMeasureSpace& space, const Coupling& q, double tol = 1e-10) {
  std::vector<double> rs(q.source.size(), 0.0), cs(q.target.size(), 0.0);
  double cost = 0.0;
  for (const auto& e : q.entries) {
    if (!(e.w >= 0.0)) return false;
    rs[static_cast<std::size_t>(e.i)] += e.w;
    cs[static_cast<std::size_t>(e.j)] += e.w;
    cost += e.w * space.dist(e.i, e.j) * space.dist(e.i, e.j);
  }
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (std::abs(rs[i] - q.source[i]) > tol || std::abs(cs[i] - q.target[i]) > tol) return false;
  return std::abs(cost - q.cost) <= tol;
}

struct MonotonicityResult {
  bool monotone = true;
  /// Pairs (x_1,y_1),...,(x_k,y_k) with sum d^2(x_i,y_i) > sum d^2(x_i,y_{i+1}).
  std::vector<std::pair<Index, Index>> witness;
  double gain = 0.0;  // how much the cyclic shift lowers the cost
};

/// d^2-cyclical monotonicity of a set of pairs. Every cycle of length
/// <= min(k_max, 4) is covered exactly through min-plus products of the
/// exchange matrix W(a,b) = d^2(x_a, y_b) - d^2(x_a, y_a); a negative closed
/// walk of length <= 4 contains a negative simple cycle of length <= 4.
/// `samples` random cycles of length 5..k_max are tried on top.
inline MonotonicityResult is_cyclically_monotone(const std::vector<std::pair<Index, Index>>& pairs,
                                                 const FiniteMetricMeasureSpace& space, int k_max, int samples,
                                                 std::uint64_t seed, double tol = 1e-12) {
  if (k_max < 2) throw DomainError("is_cyclically_monotone: k_max must be >= 2");
  MonotonicityResult res;
  const auto P = pairs.size();
  if (P < 2) return res;
  auto c = [&](std::size_t a, std::size_t b) {
    const double d = space.dist(pairs[a].first, pairs[b].second);
    return d * d;
  };
  // Row-major exchange matrix.
  std::vector<double> W(P * P);
  double scale = 0.0;
  for (std::size_t a = 0; a < P; ++a) {
    const double own = c(a, a);
    scale = std::max(scale, own);
    for (std::size_t b = 0; b < P; ++b) W[a * P + b] = c(a, b) - own;
  }
  const double thresh = -tol * std::max(1.0, scale);
  auto w = [&](std::size_t a, std::size_t b) { return W[a * P + b]; };
  auto cycle_sum = [&](const std::vector<std::size_t>& cyc) {
    double s = 0.0;
    for (std::size_t t = 0; t < cyc.size(); ++t) s += w(cyc[t], cyc[(t + 1) % cyc.size()]);
    return s;
  };
  auto report = [&](const std::vector<std::size_t>& cyc) {
    res.monotone = false;
    res.gain = -cycle_sum(cyc);
    for (auto a : cyc) res.witness.push_back(pairs[a]);
  };

  // Length 2.
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = a + 1; b < P; ++b)
      if (w(a, b) + w(b, a) < thresh) {
        report({a, b});
        return res;
      }
  if (k_max >= 3) {
    // W2(a,b) = min_k W(a,k) + W(k,b); the argmin is recovered only for a witness.
    std::vector<double> W2(P * P, std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < P; ++a) {
      double* out = W2.data() + a * P;
      for (std::size_t k = 0; k < P; ++k) {
        const double wak = W[a * P + k];
        const double* row = W.data() + k * P;
        for (std::size_t b = 0; b < P; ++b) out[b] = std::min(out[b], wak + row[b]);
      }
    }
    auto via = [&](std::size_t a, std::size_t b) {
      std::size_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < P; ++k)
        if (w(a, k) + w(k, b) < best) {
          best = w(a, k) + w(k, b);
          arg = k;
        }
      return arg;
    };
    // A negative closed walk splits into simple cycles, one of them negative.
    auto simple_witness = [&](std::vector<std::size_t> walk) {
      for (bool split = true; split;) {
        split = false;
        for (std::size_t i = 0; i < walk.size() && !split; ++i)
          for (std::size_t j = i + 1; j < walk.size() && !split; ++j)
            if (walk[i] == walk[j]) {
              std::vector<std::size_t> inner(walk.begin() + static_cast<long>(i), walk.begin() + static_cast<long>(j));
              std::vector<std::size_t> outer(walk.begin(), walk.begin() + static_cast<long>(i));
              outer.insert(outer.end(), walk.begin() + static_cast<long>(j), walk.end());
              walk = cycle_sum(inner) < cycle_sum(outer) ? inner : outer;
              split = true;
            }
      }
      return walk;
    };
    // Closed walks a -> k -> b -> a.
    for (std::size_t a = 0; a < P; ++a)
      for (std::size_t b = 0; b < P; ++b)
        if (W2[a * P + b] + w(b, a) < thresh) {
          report(simple_witness({a, via(a, b), b}));
          return res;
        }
    // Closed walks a -> k -> b -> l -> a.
    if (k_max >= 4) {
      for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = 0; b < P; ++b)
          if (W2[a * P + b] + W2[b * P + a] < thresh) {
            report(simple_witness({a, via(a, b), b, via(b, a)}));
            return res;
          }
    }
  }
  if (k_max > 4 && samples > 0 && P >= 5) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(P);
    for (std::size_t a = 0; a < P; ++a) idx[a] = a;
    const auto longest = std::min<std::size_t>(static_cast<std::size_t>(k_max), P);
    std::uniform_int_distribution<std::size_t> len(5, longest);
    for (int s = 0; s < samples; ++s) {
      const auto k = len(rng);
      for (std::size_t t = 0; t < k; ++t) std::swap(idx[t], idx[t + std::uniform_int_distribution<std::size_t>(0, P - 1 - t)(rng)]);
      std::vector<std::size_t> cyc(idx.begin(), idx.begin() + static_cast<long>(k));
      if (cycle_sum(cyc) < thresh) {
        report(cyc);
        return res;
      }
    }
  }
  return res;
}

}  // namespace conecd
