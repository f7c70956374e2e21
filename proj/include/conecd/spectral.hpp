#pragma once

// Kernel graph Laplacians on finite metric measure spaces and the first
// nonzero eigenvalue of the mass-weighted problem L f = lambda M f.
//
// Edge weights use k(u) = (1 - u^2)_+ and a local density estimate
//   rho_i = sum_j k(d_ij/h) m_j / (K0_d h^d),   K0_1 = 4/3, K0_2 = pi/2,
// so that
//   w_ij = k(d_ij/h) m_i m_j / (C_d h^d sqrt(rho_i rho_j)),   C_1 = 2/15, C_2 = pi/24,
//   Q(f) = 1/2 sum w_ij (f_i - f_j)^2 / h^2
// approximates the Dirichlet energy of a d-dimensional space with measure m.
// Scaling all masses by a constant leaves the spectrum unchanged. The residual
// bandwidth bias is removed by a calibration constant fitted on a circle,
// where the first nonzero eigenvalue is exactly 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conecd/cones.hpp"
#include "conecd/error.hpp"
#include "conecd/mms.hpp"

namespace conecd {

/// Thrown by spectral_gap on a disconnected graph.
class DisconnectedGraphError : public ValidationError {
 public:
  DisconnectedGraphError(std::size_t components, const std::string& detail)
      : ValidationError("graph is disconnected: " + std::to_string(components) + " components (" + detail + ")"),
        components_(components) {}
  std::size_t components() const { return components_; }

 private:
  std::size_t components_;
};

struct GraphOperator {
  std::vector<Index> vertices;  // indices into the source space (support points)
  Eigen::VectorXd mass;
  double bandwidth = 0.0;
  int dimension = 0;
  std::int64_t edges = 0;
  double calibration = 1.0;
  Eigen::MatrixXd laplacian;  // Q(f) = f^T laplacian f

  Index size() const { return static_cast<Index>(vertices.size()); }
  double weight(Index a, Index b) const { return a == b ? 0.0 : -laplacian(a, b); }
  double dirichlet(const Eigen::VectorXd& f) const { return f.dot(laplacian * f); }
};

namespace detail {

inline double kernel(double u) { return u < 1.0 ? 1.0 - u * u : 0.0; }

/// Integral of k(|u|) over R^d.
inline double kernel_mass(int d) {
  switch (d) {
    case 1: return 4.0 / 3.0;
    case 2: return std::numbers::pi / 2.0;
    case 3: return 8.0 * std::numbers::pi / 15.0;
  }
  throw DomainError("graph_laplacian: supported dimensions are 1, 2, 3");
}

/// 1/2 integral of k(|u|) u_1^2 over R^d.
inline double kernel_second_moment(int d) {
  switch (d) {
    case 1: return 2.0 / 15.0;
    case 2: return std::numbers::pi / 24.0;
    case 3: return 4.0 * std::numbers::pi / 105.0;
  }
  throw DomainError("graph_laplacian: supported dimensions are 1, 2, 3");
}

}  // namespace detail

/// Kernel graph Laplacian of `space` restricted to its support, for a space of
/// intrinsic dimension `dimension`.
inline GraphOperator graph_laplacian(const FiniteMetricMeasureSpace& space, double bandwidth, int dimension,
                                     double calibration = 1.0) {
  if (!(bandwidth > 0.0)) throw DomainError("graph_laplacian: bandwidth must be positive");
  if (!(calibration > 0.0)) throw DomainError("graph_laplacian: calibration must be positive");
  const double k0 = detail::kernel_mass(dimension);
  const double c2 = detail::kernel_second_moment(dimension);
  GraphOperator op;
  op.bandwidth = bandwidth;
  op.dimension = dimension;
  op.calibration = calibration;
  op.vertices = space.support();
  const Index n = op.size();
  if (n == 0) throw ValidationError("graph_laplacian: empty support");
  op.mass.resize(n);
  for (Index a = 0; a < n; ++a) op.mass(a) = space.w(op.vertices[static_cast<std::size_t>(a)]);

  Eigen::MatrixXd K(n, n);
  for (Index b = 0; b < n; ++b)
    for (Index a = 0; a < n; ++a)
      K(a, b) = a == b ? 0.0
                       : detail::kernel(space.dist(op.vertices[static_cast<std::size_t>(a)],
                                                   op.vertices[static_cast<std::size_t>(b)]) /
                                        bandwidth);
  const double hd = std::pow(bandwidth, dimension);
  // Density estimate includes the vertex itself (k(0) = 1).
  Eigen::VectorXd rho = (K * op.mass + op.mass) / (k0 * hd);

  const double scale = calibration / (c2 * hd * bandwidth * bandwidth);
  op.laplacian.resize(n, n);
  for (Index b = 0; b < n; ++b)
    for (Index a = 0; a < n; ++a) {
      const double w = K(a, b) * op.mass(a) * op.mass(b) / std::sqrt(rho(a) * rho(b));
      op.laplacian(a, b) = -scale * w;
      if (a < b && w > 0.0) ++op.edges;
    }
  if (op.edges == 0) throw ValidationError("graph_laplacian: bandwidth below the minimal distance (empty graph)");
  // f^T (D - W) f = 1/2 sum_ab W_ab (f_a - f_b)^2.
  for (Index a = 0; a < n; ++a) op.laplacian(a, a) = -(op.laplacian.row(a).sum() - op.laplacian(a, a));
  return op;
}

/// Connected components of the edge graph, as lists of operator-local indices.
inline std::vector<std::vector<Index>> connected_components(const GraphOperator& op) {
  const Index n = op.size();
  std::vector<Index> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> comps;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    comps.emplace_back();
    std::vector<Index> stack{s};
    label[static_cast<std::size_t>(s)] = static_cast<Index>(comps.size() - 1);
    while (!stack.empty()) {
      const Index a = stack.back();
      stack.pop_back();
      comps.back().push_back(a);
      for (Index b = 0; b < n; ++b)
        if (label[static_cast<std::size_t>(b)] < 0 && op.laplacian(a, b) < 0.0) {
          label[static_cast<std::size_t>(b)] = label[static_cast<std::size_t>(a)];
          stack.push_back(b);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

inline void require_connected(const GraphOperator& op) {
  const auto comps = connected_components(op);
  if (comps.size() <= 1) return;
  std::string detail;
  for (std::size_t c = 0; c < comps.size() && c < 8; ++c) {
    if (c) detail += "; ";
    detail += "size " + std::to_string(comps[c].size()) + " from vertex " +
              std::to_string(op.vertices[static_cast<std::size_t>(comps[c].front())]);
  }
  if (comps.size() > 8) detail += "; ...";
  throw DisconnectedGraphError(comps.size(), detail);
}

namespace detail {

inline Eigen::MatrixXd symmetric_form(const GraphOperator& op) {
  const Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * op.laplacian * s.asDiagonal();
}

}  // namespace detail

/// Ascending eigenvalues of L f = lambda M f.
inline Eigen::VectorXd spectrum(const GraphOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::symmetric_form(op), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("spectrum: eigensolver failed");
  return es.eigenvalues();
}

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns, M-orthonormal
};

inline Eigenpairs eigenpairs(const GraphOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::symmetric_form(op));
  if (es.info() != Eigen::Success) throw Error("eigenpairs: eigensolver failed");
  const Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  return {es.eigenvalues(), s.asDiagonal() * es.eigenvectors()};
}

/// Smallest nonzero eigenvalue; the graph must be connected.
inline double spectral_gap(const GraphOperator& op) {
  if (op.size() < 2) throw ValidationError("spectral_gap: need at least two vertices");
  require_connected(op);
  return spectrum(op)(1);
}

struct GapReport {
  double gap = 0.0;
  double bound = 0.0;  // n + 1
  int n = 0;
  double bandwidth = 0.0;
  double calibration = 1.0;
  double tol_rel = 0.0;
  bool pass = false;
};

/// Default bandwidth for a spherical cone grid: 4 grid spacings.
inline double default_bandwidth(const ConeGrid& grid) { return 4.0 * grid.max_spacing(); }

/// Calibration constant for bandwidth = ratio x spacing: the reciprocal of the
/// uncalibrated gap of circle_space(count), whose true value is 1.
inline double circle_calibration(double ratio, Index count) {
  if (!(ratio > 0.0)) throw DomainError("circle_calibration: ratio must be positive");
  if (count < 3) throw DomainError("circle_calibration: need at least 3 points");
  const double spacing = 2.0 * std::numbers::pi / static_cast<double>(count);
  return 1.0 / spectral_gap(graph_laplacian(circle_space(count), ratio * spacing, 1));
}

/// Calibration matched to a cone grid: a circle with the grid's spacing.
inline double grid_calibration(const ConeGrid& grid, double bandwidth) {
  const double h = grid.max_spacing();
  const auto count = std::max<Index>(3, static_cast<Index>(std::lround(2.0 * std::numbers::pi / h)));
  return circle_calibration(bandwidth / h, count);
}

/// gap >= (n + 1)(1 - tol_rel) on a spherical cone over an n-dimensional base.
inline GapReport lichnerowicz_check(const ConeGrid& grid, int n, double bandwidth, double tol_rel,
                                    bool calibrate = true) {
  if (grid.kind != ConeKind::spherical) throw DomainError("lichnerowicz_check: needs a spherical cone");
  if (n < 1) throw DomainError("lichnerowicz_check: n must be >= 1");
  const int dim = static_cast<int>(std::lround(grid.N)) + 1;
  GapReport r;
  r.n = n;
  r.bound = n + 1.0;
  r.bandwidth = bandwidth;
  r.tol_rel = tol_rel;
  r.calibration = calibrate ? grid_calibration(grid, bandwidth) : 1.0;
  r.gap = spectral_gap(graph_laplacian(grid.space, bandwidth, dim, r.calibration));
  r.pass = r.gap >= r.bound * (1.0 - tol_rel);
  return r;
}

/// Q(f) / sum m f^2 after subtracting the mass-weighted mean.
inline double poincare_quotient(const Eigen::VectorXd& f, const GraphOperator& op) {
  if (f.size() != op.size()) throw ValidationError("poincare_quotient: size mismatch");
  const double mean = f.dot(op.mass) / op.mass.sum();
  const Eigen::VectorXd g = f.array() - mean;
  const double denom = g.cwiseProduct(g).dot(op.mass);
  if (!(denom > 0.0)) throw DomainError("poincare_quotient: f is constant");
  return op.dirichlet(g) / denom;
}

}  // namespace conecd
