#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "omdlab/scenario.hpp"

using namespace omdlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario tiny_exact_scenario() {
  Scenario s;
  s.name = "tiny";
  s.runner = "exact";
  s.eta = 0.1;
  s.eps = 1e-10;
  s.T = 50;
  s.seeds = {3};
  s.d = 2;
  s.loss_kind = "switching";
  Vec a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  s.phases = {{25, a}, {25, b}};
  s.regret_svg = true;
  return s;
}

}  // namespace

TEST_CASE("config round-trips through parse/serialize") {
  for (const auto& name : list_presets()) {
    const Scenario s = preset(name);
    const std::string one = serialize_scenario(s);
    const std::string two = serialize_scenario(parse_scenario(one));
    CHECK(one == two);
  }
}

TEST_CASE("parser rejects malformed lines") {
  CHECK_THROWS_AS(parse_scenario("[scenario]\nname entropy\n"),
                  std::invalid_argument);
}

TEST_CASE("unknown preset lists the valid names") {
  CHECK_THROWS_WITH_AS(preset("nope"), doctest::Contains("entropy-lb"),
                       std::invalid_argument);
}

TEST_CASE("every preset passes its own validator") {
  // validation runs at the top of run_scenario; a validation failure throws
  // invalid_argument before any execution. An empty seed list must throw.
  for (const auto& name : list_presets()) {
    Scenario s = preset(name);
    s.seeds.clear();
    CHECK_THROWS_WITH_AS(run_scenario(s, "/tmp/omdlab_should_not_exist", 1),
                         doctest::Contains("seed list"), std::invalid_argument);
  }
}

TEST_CASE("threshold formulas") {
  // nu>1 barrier threshold for the log-barrier at the acceptance parameters
  const double e5 = barrier_robust_epsilon(Regularizer::log_barrier(), 0.05, 2000, 4);
  CHECK(e5 == doctest::Approx(std::pow(0.05, 4) / (6416.0 * 6416.0)).epsilon(1e-12));
  // entropy threshold at eta=0.05, T=400, d=4: eta^4 = T^-2 here
  const double e4 = entropy_robust_epsilon(0.05, 400, 4);
  CHECK(e4 == doctest::Approx(std::exp(-10.0) * 6.25e-6 / 24.0).epsilon(1e-12));
}

TEST_CASE("run_scenario writes deterministic outputs") {
  const Scenario s = tiny_exact_scenario();
  const std::string dir1 = "/tmp/omdlab_test_out1";
  const std::string dir2 = "/tmp/omdlab_test_out2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  CHECK(run_scenario(s, dir1, 1) == 0);
  CHECK(run_scenario(s, dir2, 2) == 0);

  const std::string trace1 = slurp(fs::path(dir1) / "tiny_seed3_trace.csv");
  const std::string trace2 = slurp(fs::path(dir2) / "tiny_seed3_trace.csv");
  CHECK(trace1 == trace2);
  CHECK(!trace1.empty());
  // header + T rows
  long lines = 0;
  for (char c : trace1)
    if (c == '\n') ++lines;
  CHECK(lines == s.T + 1);

  CHECK(slurp(fs::path(dir1) / "tiny_summary.csv") ==
        slurp(fs::path(dir2) / "tiny_summary.csv"));
  CHECK(slurp(fs::path(dir1) / "tiny_regret.svg") ==
        slurp(fs::path(dir2) / "tiny_regret.svg"));
}

TEST_CASE("OMDLAB_SEED overrides the config seed list") {
  Scenario s = tiny_exact_scenario();
  s.seeds = {1, 2, 3, 4};
  s.regret_svg = false;
  const std::string dir = "/tmp/omdlab_test_envseed";
  fs::remove_all(dir);
  setenv("OMDLAB_SEED", "9", 1);
  const int rc = run_scenario(s, dir, 1);
  unsetenv("OMDLAB_SEED");
  CHECK(rc == 0);
  CHECK(fs::exists(fs::path(dir) / "tiny_seed9_trace.csv"));
  CHECK_FALSE(fs::exists(fs::path(dir) / "tiny_seed1_trace.csv"));
  const std::string summary = slurp(fs::path(dir) / "tiny_summary.csv");
  long lines = 0;
  for (char c : summary)
    if (c == '\n') ++lines;
  CHECK(lines == 2);  // header + one row
}

TEST_CASE("emit_svg shapes") {
  Scenario s = tiny_exact_scenario();
  // one trace -> exactly one polyline with T vertices
  std::vector<std::vector<double>> one = {{0.0, 0.5, 1.0, 1.5}};
  const std::string svg1 = emit_svg(s, one);
  long polylines = 0;
  for (size_t p = svg1.find("<polyline"); p != std::string::npos;
       p = svg1.find("<polyline", p + 1))
    ++polylines;
  CHECK(polylines == 1);
  long commas = 0;
  for (char c : svg1.substr(svg1.find("points="))) {
    if (c == ',') ++commas;
    if (c == '/') break;
  }
  CHECK(commas == 4);  // one x,y pair per vertex

  // labels carry the scenario name and parameters
  CHECK(svg1.find("tiny") != std::string::npos);
  CHECK(svg1.find("eta=") != std::string::npos);
  CHECK(svg1.find("eps=") != std::string::npos);

  // 20 seeds -> 20 + bold mean
  std::vector<std::vector<double>> many(20, std::vector<double>(5, 1.0));
  const std::string svg20 = emit_svg(s, many);
  polylines = 0;
  for (size_t p = svg20.find("<polyline"); p != std::string::npos;
       p = svg20.find("<polyline", p + 1))
    ++polylines;
  CHECK(polylines == 21);
  CHECK(emit_svg(s, many) == svg20);  // deterministic
}

TEST_CASE("double switch construction") {
  const auto traj = build_double_switch(5.0, 0.1, 1000);
  REQUIRE(traj.rounds() == 1000);
  // phases: 75 of (0,1), 50 of (1,0), 875 of (0,1)
  CHECK(traj.losses[0][1] == 1.0);
  CHECK(traj.losses[80][0] == 1.0);
  CHECK(traj.losses[200][1] == 1.0);
  // frozen interval [tau, 3 tau]
  CHECK((traj.iterates[25].coords - traj.iterates[74].coords).norm() == 0.0);
  // back to uniform at 4 tau (rounds counted from 1)
  CHECK(traj.iterates[100].coords[0] == doctest::Approx(0.5).epsilon(1e-9));
  const auto rep = regret(traj, Domain::simplex(2));
  CHECK(rep.regret >= 500.0);
  for (const auto& c : traj.certificates)
    CHECK(c.slack <= traj.eps * (1 + 1e-12));

  CHECK_THROWS_WITH_AS(build_double_switch(6.0, 0.1, 1000),
                       doctest::Contains("T*eta/20"), std::invalid_argument);
}

TEST_CASE("smooth-lb preset runs end to end with exit code 0") {
  const Scenario s = preset("smooth-lb");
  const std::string dir = "/tmp/omdlab_test_smoothlb";
  fs::remove_all(dir);
  ScenarioResult res;
  CHECK(run_scenario(s, dir, 1, &res) == 0);
  REQUIRE(res.cells.size() == 1);
  CHECK(res.cells[0].final_regret == doctest::Approx(250.0).epsilon(1e-9));
}
