#pragma once

// Finite metric measure spaces: labelled points, a dense distance matrix and a
// nonnegative weight per point.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "conecd/error.hpp"

namespace conecd {

using Index = std::ptrdiff_t;

inline constexpr double kTriangleTolerance = 1e-9;
inline constexpr double kProbabilityTolerance = 1e-12;

struct FiniteMetricMeasureSpace {
  std::vector<std::string> labels;
  Eigen::MatrixXd dist;
  std::vector<double> weight;

  Index size() const { return static_cast<Index>(weight.size()); }

  bool in_support(Index i) const { return weight[static_cast<std::size_t>(i)] > 0.0; }

  std::vector<Index> support() const {
    std::vector<Index> s;
    for (Index i = 0; i < size(); ++i)
      if (in_support(i)) s.push_back(i);
    return s;
  }

  double total_mass() const { return std::accumulate(weight.begin(), weight.end(), 0.0); }

  double w(Index i) const { return weight[static_cast<std::size_t>(i)]; }
};

/// Probability vector over the points of an ambient space. `ac[i]` records
/// whether the ambient weight at i is positive; mass sitting where it is not
/// is the singular part.
struct ProbabilityVector {
  std::vector<double> mass;
  std::vector<bool> ac;

  Index size() const { return static_cast<Index>(mass.size()); }
  double operator[](Index i) const { return mass[static_cast<std::size_t>(i)]; }

  bool fully_ac() const {
    for (std::size_t i = 0; i < mass.size(); ++i)
      if (mass[i] > 0.0 && !ac[i]) return false;
    return true;
  }

  double singular_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i)
      if (!ac[i]) s += mass[i];
    return s;
  }

  /// Density relative to the ambient weight; 0 off the support of the weight.
  double density(const FiniteMetricMeasureSpace& space, Index i) const {
    const double w = space.w(i);
    return w > 0.0 ? mass[static_cast<std::size_t>(i)] / w : 0.0;
  }
};

/// Builds a probability vector and checks it sums to one.
inline ProbabilityVector make_probability(const FiniteMetricMeasureSpace& space, std::vector<double> mass) {
  if (static_cast<Index>(mass.size()) != space.size())
    throw ValidationError("probability vector: dimension mismatch with space");
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0)) throw ValidationError("probability vector: negative or NaN mass");
    total += m;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance * std::max<double>(1.0, static_cast<double>(mass.size())))
    throw ValidationError("probability vector: masses sum to " + std::to_string(total) + ", not 1");
  ProbabilityVector p;
  p.mass = std::move(mass);
  p.ac.resize(p.mass.size());
  for (Index i = 0; i < space.size(); ++i) p.ac[static_cast<std::size_t>(i)] = space.in_support(i);
  return p;
}

/// Dirac mass at point i.
inline ProbabilityVector dirac(const FiniteMetricMeasureSpace& space, Index i) {
  std::vector<double> m(static_cast<std::size_t>(space.size()), 0.0);
  m.at(static_cast<std::size_t>(i)) = 1.0;
  return make_probability(space, std::move(m));
}

/// The ambient measure restricted to `points` and normalized.
inline ProbabilityVector normalized_restriction(const FiniteMetricMeasureSpace& space,
                                                const std::vector<Index>& points) {
  std::vector<double> m(static_cast<std::size_t>(space.size()), 0.0);
  double total = 0.0;
  for (Index i : points) total += space.w(i);
  if (!(total > 0.0)) throw ValidationError("normalized_restriction: zero ambient mass");
  for (Index i : points) m[static_cast<std::size_t>(i)] = space.w(i) / total;
  return make_probability(space, std::move(m));
}

enum class ViolationKind { shape, diagonal, symmetry, negative_distance, triangle, negative_weight, empty_support };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::shape: return "shape";
    case ViolationKind::diagonal: return "diagonal";
    case ViolationKind::symmetry: return "symmetry";
    case ViolationKind::negative_distance: return "negative_distance";
    case ViolationKind::triangle: return "triangle";
    case ViolationKind::negative_weight: return "negative_weight";
    case ViolationKind::empty_support: return "empty_support";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  Index i = -1;
  Index j = -1;
  Index k = -1;  // intermediate point of a triangle violation
  double amount = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool truncated = false;  // stopped after max_violations

  bool ok() const { return violations.empty(); }

  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
  }

  std::string summary() const {
    if (ok()) return "valid";
    std::ostringstream os;
    os << violations.size() << (truncated ? "+" : "") << " violation(s)";
    for (std::size_t n = 0; n < std::min<std::size_t>(violations.size(), 5); ++n) {
      const auto& v = violations[n];
      os << "; " << to_string(v.kind) << " at (" << v.i << "," << v.j;
      if (v.k >= 0) os << "," << v.k;
      os << ")";
    }
    return os.str();
  }
};

struct ValidateOptions {
  double triangle_tol = kTriangleTolerance;
  bool check_triangle = true;
  std::size_t max_violations = 64;
};

/// Checks every invariant of FiniteMetricMeasureSpace. The triangle check is
/// O(n^3) and dominates for large grids.
inline ValidationReport validate(const FiniteMetricMeasureSpace& space, const ValidateOptions& opt = {}) {
  ValidationReport rep;
  auto add = [&](Violation v) {
    if (rep.violations.size() >= opt.max_violations) {
      rep.truncated = true;
      return false;
    }
    rep.violations.push_back(v);
    return true;
  };
  const Index n = space.size();
  if (space.dist.rows() != n || space.dist.cols() != n || static_cast<Index>(space.labels.size()) != n) {
    add({ViolationKind::shape, n, space.dist.rows()});
    return rep;
  }
  bool any_positive = false;
  for (Index i = 0; i < n; ++i) {
    if (!(space.w(i) >= 0.0)) add({ViolationKind::negative_weight, i, i, -1, space.w(i)});
    if (space.w(i) > 0.0) any_positive = true;
  }
  if (!any_positive) add({ViolationKind::empty_support});
  bool metric_ok = true;
  for (Index i = 0; i < n; ++i) {
    if (space.dist(i, i) != 0.0) {
      metric_ok = false;
      add({ViolationKind::diagonal, i, i, -1, space.dist(i, i)});
    }
    for (Index j = i + 1; j < n; ++j) {
      if (!(space.dist(i, j) >= 0.0) || !(space.dist(j, i) >= 0.0)) {
        metric_ok = false;
        add({ViolationKind::negative_distance, i, j, -1, std::min(space.dist(i, j), space.dist(j, i))});
      }
      if (space.dist(i, j) != space.dist(j, i)) {
        metric_ok = false;
        add({ViolationKind::symmetry, i, j, -1, space.dist(i, j) - space.dist(j, i)});
      }
    }
  }
  if (!opt.check_triangle || !metric_ok || rep.truncated) return rep;

  // dist is symmetric here, so column k doubles as row k (column-major storage).
  std::vector<double> best(static_cast<std::size_t>(n));
  for (Index i = 0; i < n && !rep.truncated; ++i) {
    const double* di = space.dist.col(i).data();
    std::fill(best.begin(), best.end(), HUGE_VAL);
    double* b = best.data();
    for (Index k = 0; k < n; ++k) {
      const double dik = di[k];
      const double* dk = space.dist.col(k).data();
      for (Index j = 0; j < n; ++j) b[j] = std::min(b[j], dik + dk[j]);
    }
    for (Index j = i + 1; j < n; ++j) {
      const double excess = di[j] - b[j];
      if (excess <= opt.triangle_tol) continue;
      Index via = 0;
      for (Index k = 1; k < n; ++k)
        if (di[k] + space.dist(k, j) < di[via] + space.dist(via, j)) via = k;
      if (!add({ViolationKind::triangle, i, j, via, excess})) break;
    }
  }
  return rep;
}

/// Throws ValidationError carrying the report summary unless the space is valid.
inline void require_valid(const FiniteMetricMeasureSpace& space, const ValidateOptions& opt = {}) {
  const auto rep = validate(space, opt);
  if (!rep.ok()) throw ValidationError("invalid metric measure space: " + rep.summary());
}

/// Largest distance between two points of the support of the weight.
inline double diameter(const FiniteMetricMeasureSpace& space) {
  const auto supp = space.support();
  if (supp.empty()) throw ValidationError("diameter: empty support");
  double d = 0.0;
  for (std::size_t a = 0; a < supp.size(); ++a)
    for (std::size_t b = a + 1; b < supp.size(); ++b) d = std::max(d, space.dist(supp[a], supp[b]));
  return d;
}

struct AntipodeSet {
  std::vector<Index> points;
  /// Two or more antipodes at mutual distance > tol. Impossible on a
  /// CD(N-1,N) space, where antipodes are unique.
  bool multiple_distinct = false;
};

/// Support points at distance >= pi - tol from point i.
inline AntipodeSet antipode_set(const FiniteMetricMeasureSpace& space, Index i, double tol) {
  AntipodeSet out;
  for (Index j = 0; j < space.size(); ++j)
    if (space.in_support(j) && space.dist(i, j) >= std::numbers::pi - tol) out.points.push_back(j);
  for (std::size_t a = 0; a < out.points.size() && !out.multiple_distinct; ++a)
    for (std::size_t b = a + 1; b < out.points.size(); ++b)
      if (space.dist(out.points[a], out.points[b]) > tol) {
        out.multiple_distinct = true;
        break;
      }
  return out;
}

/// Equally spaced points on the unit circle with the angular metric and
/// arc-length weights (total mass 2 pi).
inline FiniteMetricMeasureSpace circle_space(Index count) {
  if (count < 2) throw DomainError("circle_space: need at least 2 points");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  FiniteMetricMeasureSpace s;
  s.labels.reserve(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j) s.labels.push_back("c" + std::to_string(j));
  s.weight.assign(static_cast<std::size_t>(count), two_pi / static_cast<double>(count));
  s.dist.resize(count, count);
  for (Index a = 0; a < count; ++a)
    for (Index b = 0; b < count; ++b) {
      // Angular distance from the index gap so that exact antipodes give pi.
      const Index gap = std::min<Index>(std::abs(a - b), count - std::abs(a - b));
      s.dist(a, b) = std::numbers::pi * (2.0 * static_cast<double>(gap) / static_cast<double>(count));
    }
  return s;
}

}  // namespace conecd
