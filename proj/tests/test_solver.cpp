#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "test_meshes.hpp"
#include "yamabe/flow.hpp"
#include "yamabe/solver.hpp"

using namespace yamabe;

namespace {
Eigen::VectorXd mean_centered(const Eigen::VectorXd& u) { return u.array() - u.mean(); }
}  // namespace

TEST_CASE("already optimal start converges immediately", "[solver]") {
  const auto tri = meshes::tetrahedron();
  const auto result = minimize_energy(tri, meshes::unit_metric(tri), Eigen::VectorXd::Zero(4),
                                      TargetCurvature::constant(tri));
  CHECK(result.status == SolveStatus::Converged);
  CHECK(result.iters == 0);
  CHECK(result.u_star == Eigen::VectorXd::Zero(4));
  CHECK(result.step_kinds.empty());
}

TEST_CASE("minimizer from a degenerate start", "[solver]") {
  const auto tri = meshes::tetrahedron();
  const auto metric = meshes::unit_metric(tri);
  Eigen::VectorXd u0(4);
  u0 << 4.0 * std::log(2.0), 4.0 * std::log(2.0), 0.0, 0.0;

  const auto result = minimize_energy(tri, metric, u0, TargetCurvature::constant(tri));
  CHECK(result.status == SolveStatus::Converged);
  CHECK(result.grad_norm_final < 1e-10);
  CHECK(result.u_star.lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(std::abs(result.u_star.sum()) < 1e-10);
  // The start is outside the Hessian-safe region, so at least one gradient
  // fallback step must appear before Newton steps take over.
  REQUIRE_FALSE(result.step_kinds.empty());
  CHECK(result.step_kinds.front() == StepKind::Gradient);
  bool any_newton = false;
  for (StepKind k : result.step_kinds) any_newton |= (k == StepKind::Newton);
  CHECK(any_newton);
}

TEST_CASE("energy decreases monotonically along iterations", "[solver]") {
  const auto tri = meshes::octahedron();
  const auto metric = meshes::unit_metric(tri);
  std::mt19937_64 rng(61);
  const Eigen::VectorXd u0 = oracles::random_vector(rng, 6, -1.0, 1.0);
  const auto result = minimize_energy(tri, metric, u0, TargetCurvature::constant(tri));
  CHECK(result.status == SolveStatus::Converged);
  REQUIRE(result.energy_trace.size() >= 2);
  // Strict descent until the decrements fall below the resolution of the
  // energy itself, where accepted steps may tie to roundoff.
  for (std::size_t i = 1; i < result.energy_trace.size(); ++i) {
    CHECK(result.energy_trace[i] <= result.energy_trace[i - 1] + 1e-14);
  }
  CHECK(result.energy_trace.back() < result.energy_trace.front());
}

TEST_CASE("uniqueness of the minimizer across starts", "[solver]") {
  std::mt19937_64 rng(62);
  for (const auto& tri : {meshes::tetrahedron(), meshes::octahedron(), meshes::double_pyramid()}) {
    const auto metric = meshes::unit_metric(tri);
    const auto target = TargetCurvature::constant(tri);
    std::vector<Eigen::VectorXd> minimizers;
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd u0 = oracles::random_vector(rng, tri.vertex_count(), -1.0, 1.0);
      const auto result = minimize_energy(tri, metric, u0, target);
      REQUIRE(result.status == SolveStatus::Converged);
      CHECK(std::abs(result.u_star.sum()) < 1e-10);
      minimizers.push_back(result.u_star);
    }
    for (std::size_t a = 0; a < minimizers.size(); ++a) {
      for (std::size_t b = a + 1; b < minimizers.size(); ++b) {
        CHECK((minimizers[a] - minimizers[b]).lpNorm<Eigen::Infinity>() < 1e-6);
      }
    }
  }
}

TEST_CASE("solver agrees with the flow limit", "[solver]") {
  const auto tri = meshes::tetrahedron();
  const auto metric = meshes::unit_metric(tri);
  const auto target = TargetCurvature::constant(tri);
  Eigen::VectorXd u0(4);
  u0 << 4.0 * std::log(2.0), 4.0 * std::log(2.0), 0.0, 0.0;

  const auto flow = integrate_flow(tri, metric, u0, target, {});
  REQUIRE(flow.status == FlowStatus::Converged);
  const auto solve = minimize_energy(tri, metric, u0, target);
  REQUIRE(solve.status == SolveStatus::Converged);
  CHECK((solve.u_star - mean_centered(flow.u_final)).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("prescribed-curvature solve recovers the generating factor", "[solver]") {
  const auto tri = meshes::tetrahedron();
  const auto metric = meshes::unit_metric(tri);
  Eigen::VectorXd u_bar(4);
  u_bar << 0.2, -0.2, 0.1, -0.1;
  const auto target = TargetCurvature::prescribed(extended_curvatures(tri, metric, u_bar));

  const auto result = minimize_energy(tri, metric, Eigen::VectorXd::Zero(4), target);
  REQUIRE(result.status == SolveStatus::Converged);
  CHECK((result.u_star - mean_centered(u_bar)).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("inadmissible target is reported, not thrown", "[solver]") {
  const auto tri = meshes::tetrahedron();
  const auto metric = meshes::unit_metric(tri);
  constexpr double pi = std::numbers::pi;
  // Sums to 2 pi chi, but no factor can reach curvature above 2 pi at a
  // vertex, so the gradient can never vanish.
  Eigen::VectorXd impossible(4);
  const double rest = (4.0 * pi - (2.0 * pi + 1.0)) / 3.0;
  impossible << 2.0 * pi + 1.0, rest, rest, rest;

  SolveParams params;
  params.max_iters = 40;
  const auto result =
      minimize_energy(tri, metric, Eigen::VectorXd::Zero(4),
                      TargetCurvature::prescribed(impossible), params);
  CHECK(result.status != SolveStatus::Converged);
  CHECK(result.grad_norm_final >= 1.0);
  CHECK(result.energy_trace.back() < result.energy_trace.front());
}

TEST_CASE("solver validation", "[solver]") {
  const auto tri = meshes::tetrahedron();
  const auto metric = meshes::unit_metric(tri);
  const auto target = TargetCurvature::constant(tri);

  CHECK_THROWS_AS(minimize_energy(tri, metric, Eigen::VectorXd::Zero(3), target),
                  DimensionMismatch);
  SolveParams bad;
  bad.armijo_c = 1.5;
  CHECK_THROWS_AS(minimize_energy(tri, metric, Eigen::VectorXd::Zero(4), target, bad),
                  InvalidInput);
  Eigen::VectorXd off(4);
  off << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(
      minimize_energy(tri, metric, Eigen::VectorXd::Zero(4), TargetCurvature::prescribed(off)),
      TargetGaussBonnetViolation);
}
