#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "yamabe/io.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kCli = YAMABE_CLI_PATH;
const fs::path kData = YAMABE_DATA_DIR;

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = fs::temp_directory_path() / ("yamabe_cli_out_" + std::to_string(counter++));
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  result.stdout_text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  fs::remove(out);
  return result;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / ("yamabe_cli_fixture_" + name);
  std::ofstream out(path);
  out << content;
  return path;
}

std::string tetra() { return (kData / "tetrahedron.json").string(); }

}  // namespace

TEST_CASE("check command", "[cli]") {
  const auto result = run("check --input " + tetra());
  REQUIRE(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j["report"] == "check");
  CHECK(j["vertex_count"] == 4);
  CHECK(j["euler_characteristic"] == 2);
  CHECK(j["obstruction"]["passes"] == true);
  CHECK(j["obstruction"]["worst_ratio"]["num"] == 4);
  CHECK(j["obstruction"]["worst_ratio"]["den"] == 3);
}

TEST_CASE("curvature command", "[cli]") {
  const auto result = run("curvature --input " + tetra());
  REQUIRE(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.stdout_text);
  REQUIRE(j["curvatures"].size() == 4);
  for (const auto& k : j["curvatures"]) {
    CHECK(std::abs(k.get<double>() - 3.14159265358979) < 1e-9);
  }
  CHECK(std::abs(j["gauss_bonnet_defect"].get<double>()) < 1e-9);
}

TEST_CASE("flow command converges and writes a trace", "[cli]") {
  const auto factor = write_temp("factor.json", "[2.772588722239781, 2.772588722239781, 0, 0]\n");
  const auto trace = fs::temp_directory_path() / "yamabe_cli_trace.csv";
  const auto result = run("flow --input " + tetra() + " --factor " + factor.string() +
                          " --trace " + trace.string());
  REQUIRE(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j["status"] == "converged");
  CHECK(j["decay"]["rate"].get<double>() > 0.0);

  std::ifstream in(trace);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,time,energy,residual_inf,min_face_margin");
  fs::remove(factor);
  fs::remove(trace);
}

TEST_CASE("flow exit code 2 on non-convergence", "[cli]") {
  const auto factor = write_temp("factor2.json", "[1.0, -1.0, 0.5, -0.5]\n");
  const auto result =
      run("flow --input " + tetra() + " --factor " + factor.string() + " --max-steps 2");
  CHECK(result.exit_code == 2);
  const auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j["status"] == "max_steps_reached");

  const auto solve_result =
      run("solve --input " + tetra() + " --factor " + factor.string() + " --max-iters 1");
  CHECK(solve_result.exit_code == 2);
  CHECK(nlohmann::json::parse(solve_result.stdout_text)["status"] == "max_iters_reached");
  fs::remove(factor);
}

TEST_CASE("solve command with a prescribed target", "[cli]") {
  // Curvatures of the factor (0.2, -0.2, 0.1, -0.1) on the unit tetrahedron,
  // frozen from extended_curvatures.
  const auto tri = yamabe::parse_surface_file(yamabe::detail::read_file(tetra()));
  Eigen::VectorXd u_bar(4);
  u_bar << 0.2, -0.2, 0.1, -0.1;
  const auto k_bar = yamabe::extended_curvatures(tri.first, tri.second, u_bar);
  std::string target_text = "[";
  for (int i = 0; i < 4; ++i) {
    target_text += yamabe::format_double(k_bar[i]) + (i < 3 ? ", " : "]");
  }
  const auto target = write_temp("target.json", target_text + "\n");

  const auto result = run("solve --input " + tetra() + " --target " + target.string());
  REQUIRE(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j["status"] == "converged");
  CHECK(j["grad_norm_final"].get<double>() < 1e-10);
  // u_bar is mean-centered already, so the solver should land on it.
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(j["u_star"][i].get<double>() - u_bar[i]) < 1e-6);
  }
  fs::remove(target);
}

TEST_CASE("energy command", "[cli]") {
  const auto factor = write_temp("factor3.json", "[0.1, -0.1, 0, 0]\n");
  const auto result = run("energy --input " + tetra() + " --factor " + factor.string());
  REQUIRE(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j["value"].get<double>() > 0.0);
  CHECK(j["gradient_sup_norm"].get<double>() > 0.0);
  CHECK(j["base_normalized"] == true);
  fs::remove(factor);
}

TEST_CASE("exit codes for bad input", "[cli]") {
  CHECK(run("check --input /nonexistent/surface.json").exit_code == 4);

  const auto broken = write_temp("broken.json", "{ not json");
  CHECK(run("check --input " + broken.string()).exit_code == 3);
  fs::remove(broken);

  const auto open_complex = write_temp("open.json", R"({"format_version": 1, "vertex_count": 4,
    "faces": [[0,1,2],[0,1,3]], "edge_lengths": []})");
  CHECK(run("check --input " + open_complex.string()).exit_code == 3);
  fs::remove(open_complex);

  const auto bad_target = write_temp("badtarget.json", "[1, 1, 1, 1]\n");
  CHECK(run("flow --input " + tetra() + " --target " + bad_target.string()).exit_code == 3);
  fs::remove(bad_target);

  CHECK(run("frobnicate --input x").exit_code == 3);
}

TEST_CASE("reports written via --output are byte-identical across runs", "[cli]") {
  const auto out_a = fs::temp_directory_path() / "yamabe_cli_rep_a.json";
  const auto out_b = fs::temp_directory_path() / "yamabe_cli_rep_b.json";
  const auto factor = write_temp("factor4.json", "[1.0, -1.0, 0.5, -0.5]\n");
  const std::string base =
      "flow --input " + tetra() + " --factor " + factor.string() + " --output ";
  REQUIRE(run(base + out_a.string()).exit_code == 0);
  REQUIRE(run(base + out_b.string()).exit_code == 0);
  CHECK(yamabe::detail::read_file(out_a) == yamabe::detail::read_file(out_b));
  CHECK(!yamabe::detail::read_file(out_a).empty());
  fs::remove(out_a);
  fs::remove(out_b);
  fs::remove(factor);
}

TEST_CASE("default factor and target", "[cli]") {
  // u = 0 is the constant-curvature factor of the unit tetrahedron, so the
  // defaults converge immediately.
  const auto result = run("flow --input " + tetra());
  REQUIRE(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j["steps"] == 0);
  CHECK(j["status"] == "converged");
}
