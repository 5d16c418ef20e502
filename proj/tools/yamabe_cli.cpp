// Command-line front end: validate surfaces, evaluate curvatures and energy,
// integrate the extended Yamabe flow, and minimize the conformal energy.
//
// Exit codes: 0 success/converged, 2 non-convergence, 3 invalid input,
// 4 I/O failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "yamabe/yamabe.hpp"

namespace {

struct CommonArgs {
  std::string input;
  std::string factor;
  std::string target;
  std::string output;
};

struct LoadedProblem {
  yamabe::Triangulation tri;
  yamabe::PLMetric metric;
  yamabe::ConformalFactor u0;
  yamabe::TargetCurvature target;
  std::string digest;
};

LoadedProblem load_problem(const CommonArgs& args) {
  const std::string text = yamabe::detail::read_file(args.input);
  auto [tri, metric] = yamabe::parse_surface_file(text);
  yamabe::ConformalFactor u0 = Eigen::VectorXd::Zero(tri.vertex_count());
  if (!args.factor.empty()) u0 = yamabe::load_vector_file(args.factor, tri.vertex_count());
  yamabe::TargetCurvature target = args.target.empty()
                                       ? yamabe::TargetCurvature::constant(tri)
                                       : yamabe::load_target_file(tri, args.target);
  return LoadedProblem{std::move(tri), std::move(metric), std::move(u0), std::move(target),
                       yamabe::input_digest(text)};
}

void emit(const yamabe::ordered_json& report, const std::string& output) {
  if (output.empty()) {
    std::cout << yamabe::render_report(report);
  } else {
    yamabe::write_report(report, output);
  }
}

int run_check(const CommonArgs& args) {
  const std::string text = yamabe::detail::read_file(args.input);
  auto [tri, metric] = yamabe::parse_surface_file(text);
  const std::string digest = yamabe::input_digest(text);

  yamabe::ordered_json j;
  j["report"] = "check";
  j["input_digest"] = digest;
  j["status"] = "ok";
  j["vertex_count"] = tri.vertex_count();
  j["edge_count"] = tri.edge_count();
  j["face_count"] = tri.face_count();
  j["euler_characteristic"] = tri.euler_characteristic();
  j["average_curvature"] = yamabe::average_curvature(tri);
  if (tri.vertex_count() <= yamabe::kObstructionVertexLimit) {
    const auto ob = yamabe::check_luo_condition(tri);
    auto obj = yamabe::report_json(ob, digest);
    obj.erase("report");
    obj.erase("input_digest");
    j["obstruction"] = std::move(obj);
  } else {
    j["obstruction"] = nullptr;
    j["obstruction_note"] = "skipped: vertex count exceeds the enumeration limit of " +
                            std::to_string(yamabe::kObstructionVertexLimit);
  }
  emit(j, args.output);
  return 0;
}

int run_curvature(const CommonArgs& args) {
  const LoadedProblem p = load_problem(args);
  const auto k = yamabe::extended_curvatures(p.tri, p.metric, p.u0);
  emit(yamabe::report_json(p.tri, k, p.digest), args.output);
  return 0;
}

int run_flow(const CommonArgs& args, const yamabe::FlowParams& params,
             const std::string& trace_path) {
  const LoadedProblem p = load_problem(args);
  const auto result = yamabe::integrate_flow(p.tri, p.metric, p.u0, p.target, params);
  if (!trace_path.empty()) yamabe::write_trace_csv(result.trace, trace_path);
  emit(yamabe::report_json(result, p.digest), args.output);
  return result.status == yamabe::FlowStatus::Converged ? 0 : 2;
}

int run_solve(const CommonArgs& args, const yamabe::SolveParams& params) {
  const LoadedProblem p = load_problem(args);
  const auto result = yamabe::minimize_energy(p.tri, p.metric, p.u0, p.target, params);
  emit(yamabe::report_json(result, p.digest), args.output);
  return result.status == yamabe::SolveStatus::Converged ? 0 : 2;
}

int run_energy(const CommonArgs& args) {
  const LoadedProblem p = load_problem(args);
  const auto energy = yamabe::total_energy(p.tri, p.metric, p.u0, p.target);
  const auto gradient = yamabe::energy_gradient(p.tri, p.metric, p.u0, p.target);
  yamabe::ordered_json j;
  j["report"] = "energy";
  j["input_digest"] = p.digest;
  j["status"] = "ok";
  j["value"] = energy.value;
  j["base_normalized"] = energy.base_normalized;
  j["gradient_sup_norm"] = gradient.lpNorm<Eigen::Infinity>();
  emit(j, args.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete conformal deformation of PL-metrics on closed triangulated surfaces"};
  app.require_subcommand(1);

  CommonArgs args;
  yamabe::FlowParams flow_params;
  yamabe::SolveParams solve_params;
  std::string trace_path;

  auto add_common = [&](CLI::App* cmd, bool factor, bool target) {
    cmd->add_option("--input", args.input, "surface file (JSON)")->required();
    if (factor) cmd->add_option("--factor", args.factor, "initial conformal factor file");
    if (target) cmd->add_option("--target", args.target, "prescribed curvature file");
    cmd->add_option("--output", args.output, "write the report here instead of stdout");
  };

  CLI::App* check = app.add_subcommand("check", "validate a surface and run the obstruction test");
  add_common(check, false, false);

  CLI::App* curvature = app.add_subcommand("curvature", "extended curvatures and Gauss-Bonnet defect");
  add_common(curvature, true, false);

  CLI::App* flow = app.add_subcommand("flow", "integrate the extended Yamabe flow");
  add_common(flow, true, true);
  flow->add_option("--dt", flow_params.dt, "integrator step size");
  flow->add_flag("--adaptive", flow_params.adaptive, "energy-monotone adaptive stepping");
  flow->add_option("--tol", flow_params.tol, "sup-norm residual threshold");
  flow->add_option("--max-steps", flow_params.max_steps, "step budget");
  flow->add_option("--trace-every", flow_params.trace_every, "record every Nth step");
  flow->add_option("--trace", trace_path, "write the trace as CSV");

  CLI::App* solve = app.add_subcommand("solve", "minimize the conformal energy directly");
  add_common(solve, true, true);
  solve->add_option("--tol", solve_params.grad_tol, "sup-norm gradient threshold");
  solve->add_option("--max-iters", solve_params.max_iters, "iteration budget");

  CLI::App* energy = app.add_subcommand("energy", "energy value and gradient norm at a factor");
  add_common(energy, true, true);
  energy->get_option("--factor")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (app.got_subcommand(check)) return run_check(args);
    if (app.got_subcommand(curvature)) return run_curvature(args);
    if (app.got_subcommand(flow)) return run_flow(args, flow_params, trace_path);
    if (app.got_subcommand(solve)) return run_solve(args, solve_params);
    if (app.got_subcommand(energy)) return run_energy(args);
  } catch (const yamabe::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const yamabe::NonFiniteValue& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const yamabe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
