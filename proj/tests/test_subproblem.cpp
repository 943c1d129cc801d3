#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "omdlab/rng.hpp"
#include "omdlab/simplex_lp.hpp"
#include "oracles.hpp"

using namespace omdlab;

namespace {

StepObjective entropy_obj(Vec anchor, Vec loss, double eta) {
  const Eigen::Index d = anchor.size();
  return {eta, std::move(loss), Point::from_coords(std::move(anchor)),
          Regularizer::neg_entropy(), Domain::simplex(d)};
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("lp solves a simplex vertex problem") {
  Mat A(1, 3);
  A << 1, 1, 1;
  Vec b(1);
  b << 1;
  Vec c(3);
  c << 0.3, -0.2, 0.5;
  const auto res = solve_standard_lp(A, b, c);
  CHECK(res.objective == doctest::Approx(-0.2));
  CHECK(res.x[1] == doctest::Approx(1.0));
}

TEST_CASE("lp detects infeasibility") {
  Mat A(2, 3);
  A << 1, 1, 1,
       1, 1, 1;
  Vec b(2);
  b << 1, 2;
  CHECK_THROWS_AS(solve_standard_lp(A, b, Vec::Zero(3)), std::runtime_error);
}

TEST_CASE("objective_eval") {
  // value at the anchor is eta<loss, anchor>
  auto obj = entropy_obj(vec2(0.5, 0.5), vec2(1.0, 0.0), 0.1);
  CHECK(objective_eval(obj, obj.anchor) == doctest::Approx(0.05));

  // euclidean interval example: 0.1*0.4 + (2/2)(0.1)^2 = 0.05
  StepObjective eobj{0.1, Vec::Constant(1, 1.0),
                     Point::from_coords(Vec::Constant(1, 0.5)),
                     Regularizer::euclidean(2.0), Domain::interval(0, 1)};
  CHECK(objective_eval(eobj, Point::from_coords(Vec::Constant(1, 0.4))) ==
        doctest::Approx(0.05));

  // entropy d=2 direct evaluation example
  auto obj2 = entropy_obj(vec2(0.5, 0.5), vec2(1.0, 0.0), std::log(2.0));
  const Point w = Point::from_coords(vec2(1.0 / 3, 2.0 / 3));
  const double kl = (1.0 / 3) * std::log(2.0 / 3) + (2.0 / 3) * std::log(4.0 / 3);
  CHECK(objective_eval(obj2, w) == doctest::Approx(std::log(2.0) / 3 + kl));

  CHECK_THROWS_WITH_AS(
      objective_eval(obj, Point::from_coords(vec2(0.7, 0.7))),
      doctest::Contains("constraint 0"), std::runtime_error);
}

TEST_CASE("exact entropy step is the multiplicative weights update") {
  auto obj = entropy_obj(vec2(0.5, 0.5), vec2(1.0, 0.0), std::log(2.0));
  const auto [w, cert] = exact_step(obj);
  CHECK(w.coords[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(w.coords[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(cert.slack <= 1e-12);
  CHECK(cert.method == CertMethod::closed_form);
}

TEST_CASE("zero loss returns the anchor for every regularizer") {
  const Regularizer regs[] = {Regularizer::neg_entropy(), Regularizer::tsallis(0.5),
                              Regularizer::log_barrier(), Regularizer::euclidean(2.0)};
  Vec anchor(3);
  anchor << 0.2, 0.3, 0.5;
  for (const auto& reg : regs) {
    StepObjective obj{0.3, Vec::Zero(3), Point::from_coords(anchor), reg,
                      Domain::simplex(3)};
    const auto [w, cert] = exact_step(obj);
    CHECK((w.coords - anchor).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(cert.slack <= 1e-12);
  }
}

TEST_CASE("euclidean interval step is the clipped gradient step") {
  // interior: w = anchor - (eta/beta) * loss
  StepObjective obj{0.2, Vec::Constant(1, 0.5),
                    Point::from_coords(Vec::Constant(1, 0.5)),
                    Regularizer::euclidean(1.0), Domain::interval(0, 1)};
  const auto [w, cert] = exact_step(obj);
  CHECK(w.coords[0] == doctest::Approx(0.4));
  CHECK(cert.slack <= 1e-14);

  // clipped at the boundary
  StepObjective obj2{0.9, Vec::Constant(1, 1.0),
                     Point::from_coords(Vec::Constant(1, 0.1)),
                     Regularizer::euclidean(1.0), Domain::interval(0, 1)};
  CHECK(exact_step(obj2).first.coords[0] == doctest::Approx(0.0));
}

TEST_CASE("dual-root barrier steps match the grid oracle on small simplexes") {
  const CounterRng rng(31337);
  std::uint64_t ctr = 0;
  const Regularizer regs[] = {Regularizer::tsallis(0.5), Regularizer::log_barrier(),
                              Regularizer::tsallis(0.25)};
  for (const auto& reg : regs) {
    for (int trial = 0; trial < 12; ++trial) {
      const int d = 2 + static_cast<int>(rng.bits(ctr++) % 2);  // 2 or 3
      Vec anchor(d), loss(d);
      double sum = 0;
      for (int i = 0; i < d; ++i) {
        anchor[i] = 0.1 + rng.uniform01(ctr++);
        sum += anchor[i];
        loss[i] = rng.uniform(ctr++, -1.0, 1.0);
      }
      anchor /= sum;
      StepObjective obj{0.2, loss, Point::from_coords(anchor), reg,
                        Domain::simplex(d)};
      const auto [w, cert] = exact_step(obj);
      CHECK(cert.slack <= 1e-12);
      const auto [gw, gval] = testing::grid_search_min(obj, d == 2 ? 1e-3 : 4e-3);
      CHECK(cert.value_at_candidate <= gval + 1e-6);
      CHECK(cert.min_lower_bound <= gval + 1e-9);
    }
  }
}

TEST_CASE("certify") {
  // exact minimizer certifies with tiny slack
  auto obj = entropy_obj(vec2(0.4, 0.6), vec2(0.3, -0.8), 0.15);
  const auto [w, c0] = exact_step(obj);
  const auto [ok, cert] = certify(obj, w, 1e-10);
  CHECK(ok);
  CHECK(cert.slack <= 1e-12);

  // smooth stuck instance: anchor slack is exactly eta^2 l^2 / (2 beta)
  StepObjective sobj{0.2, Vec::Constant(1, 0.5),
                     Point::from_coords(Vec::Constant(1, 0.5)),
                     Regularizer::euclidean(1.0), Domain::interval(0, 1)};
  const auto [ok1, c1] = certify(sobj, sobj.anchor, 0.005);
  CHECK(ok1);
  CHECK(c1.slack == doctest::Approx(0.005).epsilon(1e-9));
  const auto [ok2, c2] = certify(sobj, sobj.anchor, 0.004);
  CHECK_FALSE(ok2);

  // below the numeric floor: runs at the floor and flags the relaxation
  const auto [ok3, c3] = certify(obj, w, 1e-15);
  CHECK(ok3);
  CHECK(c3.relaxed_tolerance);
}

TEST_CASE("frank-wolfe over the simplex-as-polytope matches exact_step") {
  Mat A(1, 3);
  A << 1, 1, 1;
  Vec b(1);
  b << 1;
  Vec anchor(3), loss(3);
  anchor << 0.2, 0.5, 0.3;
  loss << 0.9, -0.4, 0.1;
  StepObjective psim{0.25, loss, Point::from_coords(anchor),
                     Regularizer::neg_entropy(), Domain::polytope(A, b)};
  StepObjective ssim{0.25, loss, Point::from_coords(anchor),
                     Regularizer::neg_entropy(), Domain::simplex(3)};

  const double gap_target = 1e-8;
  const auto [wp, cp] = exact_step_polytope(psim, gap_target);
  const auto [ws, cs] = exact_step(ssim);
  CHECK(cp.method == CertMethod::fw_gap);
  CHECK(std::abs(cp.value_at_candidate - cs.value_at_candidate) <= gap_target);

  // pure Frank-Wolfe at a looser gap agrees too and its certificate is sound
  PolytopeSolveOptions opt;
  opt.gap_target = 1e-6;
  opt.pure_frank_wolfe = true;
  const auto [wf, cf] = exact_step_polytope(psim, opt);
  CHECK(cf.value_at_candidate - cs.min_lower_bound <= 1e-6 + 1e-12);
  // fw gap dominates true suboptimality
  CHECK(cf.slack + 1e-15 >= cf.value_at_candidate - cs.value_at_candidate);
}

TEST_CASE("fw gap slack dominates true suboptimality against dual_root") {
  Mat A(1, 3);
  A << 1, 1, 1;
  Vec b(1);
  b << 1;
  Vec anchor(3), loss(3);
  anchor << 0.25, 0.45, 0.3;
  loss << 0.6, -0.3, 0.2;
  const Regularizer reg = Regularizer::tsallis(0.5);
  StepObjective psim{0.2, loss, Point::from_coords(anchor), reg,
                     Domain::polytope(A, b)};
  StepObjective ssim{0.2, loss, Point::from_coords(anchor), reg,
                     Domain::simplex(3)};
  PolytopeSolveOptions opt;
  opt.gap_target = 1e-5;
  opt.pure_frank_wolfe = true;
  const auto [wf, cf] = exact_step_polytope(psim, opt);
  const auto [ws, cs] = exact_step(ssim);
  CHECK(cs.method == CertMethod::dual_root);
  const double true_subopt = cf.value_at_candidate - cs.value_at_candidate;
  CHECK(cf.slack + 1e-12 >= true_subopt);
  CHECK(cf.min_lower_bound <= cs.value_at_candidate + 1e-12);
}

TEST_CASE("frank-wolfe with zero loss stays at the anchor") {
  Mat A(1, 3);
  A << 1, 1, 1;
  Vec b(1);
  b << 1;
  Vec anchor(3);
  anchor << 0.3, 0.3, 0.4;
  StepObjective obj{0.1, Vec::Zero(3), Point::from_coords(anchor),
                    Regularizer::neg_entropy(), Domain::polytope(A, b)};
  const auto [w, cert] = exact_step_polytope(obj, 1e-10);
  CHECK(cert.value_at_candidate <= 1e-10);
  CHECK((w.coords - anchor).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("frank-wolfe iteration cap errors with the best gap attached") {
  Mat A(1, 3);
  A << 1, 1, 1;
  Vec b(1);
  b << 1;
  Vec anchor(3), loss(3);
  anchor << 0.2, 0.5, 0.3;
  loss << 0.9, -0.4, 0.1;
  StepObjective obj{0.25, loss, Point::from_coords(anchor),
                    Regularizer::neg_entropy(), Domain::polytope(A, b)};
  PolytopeSolveOptions opt;
  opt.gap_target = 1e-14;
  opt.max_iterations = 3;
  opt.pure_frank_wolfe = true;
  CHECK_THROWS_WITH_AS(exact_step_polytope(obj, opt),
                       doctest::Contains("best gap"), std::runtime_error);
}

TEST_CASE("certificate soundness against the grid oracle") {
  const CounterRng rng(4242);
  std::uint64_t ctr = 0;
  int trials = 0;
  while (trials < 200) {
    const int d = 2 + static_cast<int>(rng.bits(ctr++) % 3);  // 2..4
    Vec anchor(d), loss(d);
    double sum = 0;
    for (int i = 0; i < d; ++i) {
      anchor[i] = 0.05 + rng.uniform01(ctr++);
      sum += anchor[i];
      loss[i] = rng.uniform(ctr++, -1.0, 1.0);
    }
    anchor /= sum;
    const Regularizer reg = (trials % 3 == 0)   ? Regularizer::neg_entropy()
                            : (trials % 3 == 1) ? Regularizer::tsallis(0.5)
                                                : Regularizer::log_barrier();
    StepObjective obj{0.15, loss, Point::from_coords(anchor), reg,
                      Domain::simplex(d)};
    const auto [w, cert] = exact_step(obj);
    const double pitch = d == 4 ? 5e-3 : (d == 3 ? 4e-3 : 1e-3);
    const auto [gw, gval] = testing::grid_search_min(obj, pitch);
    CHECK(cert.min_lower_bound <= gval + 1e-9);
    ++trials;
  }
}

TEST_CASE("approx optimality gap at the exact minimizer is nonnegative") {
  auto obj = entropy_obj(vec2(0.35, 0.65), vec2(0.6, -0.2), 0.2);
  const auto [w, cert] = exact_step(obj);
  const Point target = Point::from_coords(vec2(0.7, 0.3));
  const double beta = effective_smoothness(obj.reg, w, target);
  const double ip = approx_optimality_gap(obj, w, target, 0.0, beta);
  CHECK(ip >= -1e-9);
}
