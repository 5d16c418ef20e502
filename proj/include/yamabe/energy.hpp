#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "yamabe/curvature.hpp"
#include "yamabe/lobachevsky.hpp"
#include "yamabe/surface.hpp"

namespace yamabe {

/// Minimum relative triangle-inequality margin below which the Hessian is not
/// assembled: cotangents blow up as a face degenerates, and the energy is
/// only C^1 at the boundary.
inline constexpr double kFaceMarginFloor = 1e-8;

/// Gauss-Bonnet slack allowed for prescribed curvature targets.
inline constexpr double kTargetGaussBonnetTol = 1e-9;

/// Curvature values the deformation should reach, one per vertex. Constant
/// targets are 2 pi chi / N at every vertex; prescribed targets are arbitrary
/// but must sum to 2 pi chi.
struct TargetCurvature {
  enum class Kind { Constant, Prescribed };

  Kind kind = Kind::Constant;
  Eigen::VectorXd values;

  static TargetCurvature constant(const Triangulation& tri) {
    TargetCurvature t;
    t.kind = Kind::Constant;
    t.values = Eigen::VectorXd::Constant(tri.vertex_count(), average_curvature(tri));
    return t;
  }

  static TargetCurvature prescribed(Eigen::VectorXd k_bar) {
    TargetCurvature t;
    t.kind = Kind::Prescribed;
    t.values = std::move(k_bar);
    return t;
  }
};

/// Throws unless the target has one entry per vertex and sums to 2 pi chi.
/// Without that identity the flow would drift along the all-ones direction
/// instead of converging.
inline void validate_target(const Triangulation& tri, const TargetCurvature& target) {
  detail::require_size(target.values, tri.vertex_count());
  const double expected = 2.0 * std::numbers::pi * tri.euler_characteristic();
  const double sum = target.values.sum();
  if (!(std::abs(sum - expected) <= kTargetGaussBonnetTol)) {
    throw TargetGaussBonnetViolation(sum, expected);
  }
}

/// Energy value with its normalization convention: base_normalized means the
/// value is measured relative to the energy at u = 0.
struct EnergyValue {
  double value = 0.0;
  bool base_normalized = true;
};

/// Per-triangle potential f(x,y,z) = a x + b y + c z + L(a) + L(b) + L(c),
/// where (a,b,c) are the generalized inner angles facing sides e^x, e^y, e^z
/// and L is the Lobachevsky function. Convex and C^1 on all of R^3; in the
/// degenerate regime the angles are (pi, 0, 0) and f collapses to pi times
/// the long side's log-length. See Bobenko, Pinkall & Springborn,
/// "Discrete conformal maps and ideal hyperbolic polyhedra".
inline double triangle_potential(double x, double y, double z) {
  for (double v : {x, y, z}) {
    if (std::isnan(v) || std::isinf(v)) {
      throw NonFiniteValue("triangle_potential: argument not finite");
    }
  }
  // Angles are scale-free, so shift the log-lengths by their max before
  // exponentiating; the linear term keeps the unshifted values.
  const double m = std::max({x, y, z});
  const auto side = [m](double v) {
    return std::max(std::exp(v - m), std::numeric_limits<double>::min());
  };
  const GeneralizedAngles ga = extended_angles(side(x), side(y), side(z));
  const auto& [a, b, c] = ga.angles;
  return a * x + b * y + c * z + lobachevsky(a) + lobachevsky(b) + lobachevsky(c);
}

namespace detail {

/// The closed-form convex extension of the conformal energy, up to an
/// additive constant:
///   E(u) = sum_faces [2 f(l_ij, l_jk, l_ik) - pi (l_ij + l_jk + l_ik)]
///        + sum_i (2 pi - Kbar_i) u_i,
/// with l_e = u_a/2 + u_b/2 + log d_e the rescaled log edge lengths. Its
/// gradient is the extended curvature minus the target.
inline double conformal_energy_raw(const Triangulation& tri,
                                   const std::vector<double>& ell,
                                   const ConformalFactor& u,
                                   const Eigen::VectorXd& target_values) {
  constexpr double pi = std::numbers::pi;
  double energy = 0.0;
  for (int f = 0; f < tri.face_count(); ++f) {
    const auto& fe = tri.face_edges(f);
    const double l_jk = ell[fe[0]], l_ik = ell[fe[1]], l_ij = ell[fe[2]];
    energy += 2.0 * triangle_potential(l_ij, l_jk, l_ik) - pi * (l_ij + l_jk + l_ik);
  }
  for (int i = 0; i < tri.vertex_count(); ++i) {
    energy += (2.0 * pi - target_values[i]) * u[i];
  }
  return energy;
}

}  // namespace detail

/// Base-normalized extended energy: the convex C^1 potential whose gradient
/// is extended_curvatures(u) - target, reported relative to its value at
/// u = 0 so runs are comparable.
inline EnergyValue total_energy(const Triangulation& tri, const PLMetric& metric,
                                const ConformalFactor& u, const TargetCurvature& target) {
  detail::require_size(u, tri.vertex_count());
  validate_target(tri, target);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(tri.vertex_count());
  const double at_u = detail::conformal_energy_raw(tri, detail::edge_log_lengths(tri, metric, u),
                                                   u, target.values);
  const double at_base = detail::conformal_energy_raw(
      tri, detail::edge_log_lengths(tri, metric, zero), zero, target.values);
  return EnergyValue{at_u - at_base, true};
}

/// Gradient of the extended energy: K~(u) - Kbar. Components sum to zero
/// (up to roundoff) whenever the target satisfies Gauss-Bonnet.
inline Eigen::VectorXd energy_gradient(const Triangulation& tri, const PLMetric& metric,
                                       const ConformalFactor& u, const TargetCurvature& target) {
  detail::require_size(u, tri.vertex_count());
  validate_target(tri, target);
  return extended_curvatures(tri, metric, u) - target.values;
}

/// Hessian of the energy at a strictly interior factor: the discrete Laplace
/// matrix with cotangent edge weights.
struct HessianMatrix {
  Eigen::MatrixXd matrix;
  std::vector<double> edge_weights;  ///< w_e, aligned with Triangulation::edges()
};

/// Assembles the cotangent Laplacian at u. The weight of edge {i,j} is the
/// average of the cotangents of the two angles opposite the edge in its two
/// incident faces; off-diagonal entries are -w_ij and diagonals are the row
/// sums, so the kernel contains the all-ones vector. Requires every face to
/// have relative margin above kFaceMarginFloor, else throws OutsideDomain.
inline HessianMatrix energy_hessian(const Triangulation& tri, const PLMetric& metric,
                                    const ConformalFactor& u) {
  detail::require_size(u, tri.vertex_count());
  const std::vector<double> ell = detail::edge_log_lengths(tri, metric, u);
  const double margin = detail::min_relative_margin(tri, ell);
  if (!(margin > kFaceMarginFloor)) throw OutsideDomain(margin);

  HessianMatrix h;
  h.edge_weights.assign(tri.edge_count(), 0.0);
  for (int f = 0; f < tri.face_count(); ++f) {
    const auto s = detail::face_sides_normalized(tri, ell, f);
    const double sq0 = s[0] * s[0], sq1 = s[1] * s[1], sq2 = s[2] * s[2];
    const double t0 = s[1] + s[2] - s[0];
    const double t1 = s[2] + s[0] - s[1];
    const double t2 = s[0] + s[1] - s[2];
    const double area = 0.25 * std::sqrt((s[0] + s[1] + s[2]) * t0 * t1 * t2);
    const std::array<double, 3> cot = {
        (sq1 + sq2 - sq0) / (4.0 * area),
        (sq2 + sq0 - sq1) / (4.0 * area),
        (sq0 + sq1 - sq2) / (4.0 * area),
    };
    const auto& fe = tri.face_edges(f);
    for (int k = 0; k < 3; ++k) h.edge_weights[fe[k]] += 0.5 * cot[k];
  }

  h.matrix = Eigen::MatrixXd::Zero(tri.vertex_count(), tri.vertex_count());
  for (int e = 0; e < tri.edge_count(); ++e) {
    const auto& [i, j] = tri.edges()[e];
    const double w = h.edge_weights[e];
    h.matrix(i, j) = -w;
    h.matrix(j, i) = -w;
    h.matrix(i, i) += w;
    h.matrix(j, j) += w;
  }
  return h;
}

}  // namespace yamabe
