#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "yamabe/angles.hpp"
#include "yamabe/surface.hpp"

namespace yamabe {

/// Per-vertex angle defects, one entry per vertex.
using CurvatureVector = Eigen::VectorXd;

namespace detail {

/// Log of each rescaled edge length: u_i/2 + u_j/2 + log d_ij. Working in log
/// space keeps the per-face angle evaluation immune to overflow for any real
/// factor.
inline std::vector<double> edge_log_lengths(const Triangulation& tri, const PLMetric& metric,
                                            const ConformalFactor& u) {
  std::vector<double> ell(tri.edge_count());
  for (int e = 0; e < tri.edge_count(); ++e) {
    const auto& [i, j] = tri.edges()[e];
    ell[e] = 0.5 * (u[i] + u[j]) + std::log(metric.length(e));
  }
  return ell;
}

/// Sides of face f normalized by its longest edge (so the largest side is
/// exactly 1). Side k faces corner k. exp underflow is clamped away: a side
/// that small is degenerate regardless.
inline std::array<double, 3> face_sides_normalized(const Triangulation& tri,
                                                   const std::vector<double>& ell, int f) {
  const auto& fe = tri.face_edges(f);
  const double m = std::max({ell[fe[0]], ell[fe[1]], ell[fe[2]]});
  std::array<double, 3> sides;
  for (int k = 0; k < 3; ++k) {
    sides[k] = std::max(std::exp(ell[fe[k]] - m), std::numeric_limits<double>::min());
  }
  return sides;
}

/// Generalized inner angles of face f; angle k sits at corner k.
inline GeneralizedAngles face_angles(const Triangulation& tri, const std::vector<double>& ell,
                                     int f) {
  const auto s = face_sides_normalized(tri, ell, f);
  return extended_angles(s[0], s[1], s[2]);
}

/// Smallest triangle-inequality margin over all faces, relative to the
/// longest edge of each face: (sum of the two shorter sides - longest) /
/// longest. Positive iff u*d is strictly non-degenerate.
inline double min_relative_margin(const Triangulation& tri, const std::vector<double>& ell) {
  double min_margin = std::numeric_limits<double>::infinity();
  for (int f = 0; f < tri.face_count(); ++f) {
    const auto s = face_sides_normalized(tri, ell, f);
    min_margin = std::min(min_margin, (s[0] + s[1] + s[2]) - 2.0);
  }
  return min_margin;
}

}  // namespace detail

/// Extended discrete Gaussian curvature: at each vertex, 2 pi minus the sum
/// of the generalized inner angles at that vertex over the rescaled metric.
/// Defined for every real factor u; coincides with the classical angle defect
/// whenever u*d satisfies all triangle inequalities. Faces are accumulated in
/// fixed order, so results are bitwise reproducible.
inline CurvatureVector extended_curvatures(const Triangulation& tri, const PLMetric& metric,
                                           const ConformalFactor& u) {
  detail::require_size(u, tri.vertex_count());
  const std::vector<double> ell = detail::edge_log_lengths(tri, metric, u);
  CurvatureVector curvature =
      Eigen::VectorXd::Constant(tri.vertex_count(), 2.0 * std::numbers::pi);
  for (int f = 0; f < tri.face_count(); ++f) {
    const GeneralizedAngles ga = detail::face_angles(tri, ell, f);
    const auto& verts = tri.faces()[f];
    for (int k = 0; k < 3; ++k) curvature[verts[k]] -= ga.angles[k];
  }
  return curvature;
}

/// Curvature value a constant-curvature metric must attain: 2 pi chi / N.
inline double average_curvature(const Triangulation& tri) {
  return 2.0 * std::numbers::pi * tri.euler_characteristic() / tri.vertex_count();
}

}  // namespace yamabe
