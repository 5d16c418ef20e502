#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "yamabe/energy.hpp"

namespace yamabe {

/// Parameters of the explicit flow integrator.
struct FlowParams {
  double dt = 0.1;          ///< initial (and maximum) step size
  bool adaptive = false;    ///< accept steps only if the energy does not increase
  double tol = 1e-10;       ///< sup-norm residual threshold for convergence
  long max_steps = 100000;  ///< accepted-step budget
  long trace_every = 1;     ///< record a trace entry every this many steps
};

struct TraceEntry {
  long step;
  double time;
  double energy;           ///< base-normalized energy at this state
  double residual_inf;     ///< sup-norm of K~(u) - Kbar
  double min_face_margin;  ///< smallest relative triangle-inequality margin
};

enum class FlowStatus { Converged, MaxStepsReached };

struct DecayFit {
  double rate;       ///< negated least-squares slope of log residual vs time
  double r_squared;  ///< fit quality in [0, 1]; 0 when the fit is degenerate
};

struct FlowResult {
  FlowStatus status = FlowStatus::MaxStepsReached;
  ConformalFactor u_final;
  double residual_final = 0.0;
  std::vector<TraceEntry> trace;
  std::optional<DecayFit> decay;
};

/// Least-squares exponential decay rate of the residual over the trailing
/// half of a trace. Requires at least 10 entries with positive residual.
/// A flat tail fits slope 0 and is reported as rate 0 with r_squared 0.
inline DecayFit estimate_decay_rate(const std::vector<TraceEntry>& trace) {
  long positive = 0;
  for (const auto& entry : trace) {
    if (entry.residual_inf > 0.0) ++positive;
  }
  if (positive < 10) {
    throw InsufficientTrace("decay fit needs at least 10 trace entries with positive residual, got " +
                            std::to_string(positive));
  }

  std::vector<double> t, y;
  for (std::size_t i = trace.size() / 2; i < trace.size(); ++i) {
    if (trace[i].residual_inf > 0.0) {
      t.push_back(trace[i].time);
      y.push_back(std::log(trace[i].residual_inf));
    }
  }
  if (t.size() < 2) return {0.0, 0.0};

  const double n = static_cast<double>(t.size());
  double mean_t = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mean_t += t[i];
    mean_y += y[i];
  }
  mean_t /= n;
  mean_y /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt_i = t[i] - mean_t;
    const double dy_i = y[i] - mean_y;
    stt += dt_i * dt_i;
    sty += dt_i * dy_i;
    syy += dy_i * dy_i;
  }
  if (stt == 0.0) return {0.0, 0.0};
  const double slope = sty / stt;
  if (syy == 0.0) return {-slope, 0.0};
  const double r2 = (sty * sty) / (stt * syy);
  return {-slope, r2};
}

/// Integrates the extended flow u' = Kbar - K~(u) with classical 4th-order
/// Runge-Kutta. The vector field is the continuous curvature extension, so
/// trajectories pass through factors violating triangle inequalities without
/// any special handling; integration never stops on domain exit.
///
/// In adaptive mode a step is accepted only if the (base-normalized) energy,
/// an exact Lyapunov function of the flow, grows by at most 1e-12; rejection
/// halves dt, and after 10 consecutive acceptances dt recovers by a factor
/// 1.25 up to its initial value.
///
/// Convergence means sup-norm residual below params.tol. Non-convergence
/// within max_steps is reported as a status, not an error: it is the signal
/// that no metric with the target curvature exists in the conformal class.
inline FlowResult integrate_flow(const Triangulation& tri, const PLMetric& metric,
                                 const ConformalFactor& u0, const TargetCurvature& target,
                                 const FlowParams& params) {
  detail::require_size(u0, tri.vertex_count());
  validate_target(tri, target);
  if (!(params.dt > 0.0)) throw InvalidInput("FlowParams.dt must be positive");
  if (!(params.tol > 0.0)) throw InvalidInput("FlowParams.tol must be positive");
  if (params.max_steps < 1) throw InvalidInput("FlowParams.max_steps must be at least 1");
  if (params.trace_every < 1) throw InvalidInput("FlowParams.trace_every must be at least 1");

  const auto field = [&](const ConformalFactor& u) -> Eigen::VectorXd {
    return target.values - extended_curvatures(tri, metric, u);
  };
  const auto energy_at = [&](const ConformalFactor& u) {
    return total_energy(tri, metric, u, target).value;
  };
  const auto margin_at = [&](const ConformalFactor& u) {
    return detail::min_relative_margin(tri, detail::edge_log_lengths(tri, metric, u));
  };

  FlowResult result;
  ConformalFactor u = u0;
  double time = 0.0;
  double dt = params.dt;
  long step = 0;
  int consecutive_accepts = 0;
  int consecutive_rejects = 0;

  Eigen::VectorXd k1 = field(u);
  double residual = k1.lpNorm<Eigen::Infinity>();
  double energy = energy_at(u);
  result.trace.push_back({0, 0.0, energy, residual, margin_at(u)});

  bool converged = residual < params.tol;
  while (!converged && step < params.max_steps) {
    const double step_dt = dt;
    const Eigen::VectorXd k2 = field(u + (0.5 * step_dt) * k1);
    const Eigen::VectorXd k3 = field(u + (0.5 * step_dt) * k2);
    const Eigen::VectorXd k4 = field(u + step_dt * k3);
    const ConformalFactor u_next = u + (step_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!u_next.allFinite()) {
      if (!params.adaptive) {
        throw NonFiniteValue("flow state became non-finite; step size too large");
      }
      dt *= 0.5;
      consecutive_accepts = 0;
      if (++consecutive_rejects > 200) {
        throw NonFiniteValue("flow step size underflow while rejecting non-finite states");
      }
      continue;
    }

    if (params.adaptive) {
      const double energy_next = energy_at(u_next);
      if (energy_next > energy + 1e-12) {
        dt *= 0.5;
        consecutive_accepts = 0;
        if (++consecutive_rejects > 200) {
          throw NonFiniteValue("flow step size underflow in energy line control");
        }
        continue;
      }
      energy = energy_next;
      consecutive_rejects = 0;
      if (++consecutive_accepts >= 10) {
        dt = std::min(dt * 1.25, params.dt);
        consecutive_accepts = 0;
      }
    }

    u = u_next;
    ++step;
    time += step_dt;
    k1 = field(u);
    residual = k1.lpNorm<Eigen::Infinity>();
    converged = residual < params.tol;

    if (step % params.trace_every == 0 || converged || step == params.max_steps) {
      if (!params.adaptive) energy = energy_at(u);
      result.trace.push_back({step, time, energy, residual, margin_at(u)});
    }
  }

  result.status = converged ? FlowStatus::Converged : FlowStatus::MaxStepsReached;
  result.u_final = std::move(u);
  result.residual_final = residual;

  if (converged) {
    long positive = 0;
    for (const auto& entry : result.trace) {
      if (entry.residual_inf > 0.0) ++positive;
    }
    if (positive >= 10) result.decay = estimate_decay_rate(result.trace);
  }
  return result;
}

}  // namespace yamabe
