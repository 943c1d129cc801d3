#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "property_suites.hpp"

using namespace omdlab::testing;

TEST_CASE("three-points identity suite") {
  const auto r = suite_three_points();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("exact balance identity suite") {
  const auto r = suite_balance_identity();
  CHECK(r.instances >= 500);
  CHECK(r.violations == 0);
}

TEST_CASE("balance additivity suite") {
  const auto r = suite_balance_additivity();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("trajectory difference bound suite") {
  const auto r = suite_trajectory_diff();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("entropy gradient ceiling suite") {
  const auto r = suite_gradient_ceiling();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("simplex coordinate bounds suite") {
  const auto r = suite_coordinate_bounds();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("max-step and not-too-far audit suite") {
  const auto r = suite_step_audits();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("solver vs grid oracle suite") {
  const auto r = suite_solver_vs_grid();
  CHECK(r.instances >= 200);
  CHECK(r.violations == 0);
}

TEST_CASE("approximate optimality condition suite") {
  const auto r = suite_approx_optimality();
  CHECK(r.instances >= 1000);
  CHECK(r.violations == 0);
}
