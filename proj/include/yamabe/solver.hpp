#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "yamabe/energy.hpp"

namespace yamabe {

/// Parameters of the projected Newton descent.
struct SolveParams {
  double grad_tol = 1e-10;  ///< sup-norm of the residual K~(u) - Kbar
  int max_iters = 200;
  double armijo_c = 1e-4;        ///< sufficient-decrease constant
  double backtrack = 0.5;        ///< step shrink factor in (0, 1)
  double fallback_margin = kFaceMarginFloor;  ///< below this, use gradient steps
};

enum class SolveStatus { Converged, MaxIters, LineSearchStall };
enum class StepKind { Newton, Gradient };

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIters;
  ConformalFactor u_star;  ///< mean-centered iterate at exit
  int iters = 0;
  double grad_norm_final = 0.0;
  std::vector<StepKind> step_kinds;    ///< one entry per accepted iteration
  std::vector<double> energy_trace;    ///< base-normalized energy per visited iterate
};

namespace detail {

inline ConformalFactor mean_centered(const ConformalFactor& u) {
  return u.array() - u.mean();
}

}  // namespace detail

/// Minimizes the extended convex energy over the zero-mean hyperplane,
/// yielding the factor with the target curvature whenever one exists.
///
/// Strictly inside the triangle-inequality region the step solves
/// (H + mu I) p = -g with the cotangent Hessian and a tiny ridge mu = 1e-12
/// absorbing the all-ones kernel; gradient and direction are both projected
/// onto the hyperplane, so iterates keep sum u = 0 exactly up to roundoff.
/// Near or beyond degenerate faces the energy is only C^1 and the step falls
/// back to projected gradient descent. Both step kinds share an Armijo
/// backtracking line search on the energy.
inline SolveResult minimize_energy(const Triangulation& tri, const PLMetric& metric,
                                   const ConformalFactor& u0, const TargetCurvature& target,
                                   const SolveParams& params = {}) {
  detail::require_size(u0, tri.vertex_count());
  validate_target(tri, target);
  if (!(params.grad_tol > 0.0)) throw InvalidInput("SolveParams.grad_tol must be positive");
  if (params.max_iters < 1) throw InvalidInput("SolveParams.max_iters must be at least 1");
  if (!(params.armijo_c > 0.0 && params.armijo_c < 1.0)) {
    throw InvalidInput("SolveParams.armijo_c must lie in (0, 1)");
  }
  if (!(params.backtrack > 0.0 && params.backtrack < 1.0)) {
    throw InvalidInput("SolveParams.backtrack must lie in (0, 1)");
  }

  const int n = tri.vertex_count();
  const auto energy_at = [&](const ConformalFactor& u) {
    const double value = total_energy(tri, metric, u, target).value;
    if (!std::isfinite(value)) throw NonFiniteValue("solver energy became non-finite");
    return value;
  };

  SolveResult result;
  ConformalFactor u = detail::mean_centered(u0);
  double energy = energy_at(u);
  result.energy_trace.push_back(energy);

  for (int iter = 0; iter <= params.max_iters; ++iter) {
    const Eigen::VectorXd residual = extended_curvatures(tri, metric, u) - target.values;
    const double grad_norm = residual.lpNorm<Eigen::Infinity>();
    if (grad_norm < params.grad_tol) {
      result.status = SolveStatus::Converged;
      result.u_star = std::move(u);
      result.iters = iter;
      result.grad_norm_final = grad_norm;
      return result;
    }
    if (iter == params.max_iters) {
      result.status = SolveStatus::MaxIters;
      result.u_star = std::move(u);
      result.iters = iter;
      result.grad_norm_final = grad_norm;
      return result;
    }

    const Eigen::VectorXd g = residual.array() - residual.mean();

    StepKind kind = StepKind::Gradient;
    Eigen::VectorXd direction = -g;
    const double margin =
        detail::min_relative_margin(tri, detail::edge_log_lengths(tri, metric, u));
    if (margin > params.fallback_margin) {
      const HessianMatrix hess = energy_hessian(tri, metric, u);
      Eigen::MatrixXd system = hess.matrix;
      system.diagonal().array() += 1e-12;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd p = ldlt.solve(-g);
        p.array() -= p.mean();
        if (p.allFinite() && g.dot(p) < 0.0) {
          direction = std::move(p);
          kind = StepKind::Newton;
        }
      }
    }

    const double slope = g.dot(direction);
    // Deep in the quadratic basin the predicted Armijo decrement falls below
    // the roundoff noise of the energy evaluation and the comparison carries
    // no signal; there the step is judged by residual decrease instead.
    const double noise_floor = 1e-13 * (1.0 + std::abs(energy));
    const bool energy_resolvable = std::abs(params.armijo_c * slope) >= noise_floor;

    double alpha = 1.0;
    bool accepted = false;
    ConformalFactor trial(n);
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial = u + alpha * direction;
      if (energy_resolvable) {
        if (energy_at(trial) <= energy + params.armijo_c * alpha * slope) {
          accepted = true;
          break;
        }
      } else {
        const Eigen::VectorXd trial_residual =
            extended_curvatures(tri, metric, trial) - target.values;
        if (trial_residual.lpNorm<Eigen::Infinity>() <= grad_norm) {
          accepted = true;
          break;
        }
      }
      alpha *= params.backtrack;
    }
    if (!accepted) {
      result.status = SolveStatus::LineSearchStall;
      result.u_star = detail::mean_centered(u);
      result.iters = iter;
      result.grad_norm_final = grad_norm;
      return result;
    }

    u = detail::mean_centered(trial);
    energy = energy_at(u);
    result.step_kinds.push_back(kind);
    result.energy_trace.push_back(energy);
  }

  return result;  // unreachable
}

}  // namespace yamabe
