#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "omdlab/instances.hpp"
#include "omdlab/scenario.hpp"
#include "omdlab/simplex_lp.hpp"

using namespace omdlab;

TEST_CASE("constant stream repeats its row") {
  LossSpec spec;
  spec.kind = LossKind::constant;
  spec.constant = Vec::Ones(4);
  spec.constant[3] = 0.0;
  const auto s = make_loss_stream(spec, 100, 0);
  REQUIRE(s.rows.size() == 100);
  for (const auto& r : s.rows) CHECK((r - spec.constant).norm() == 0.0);
  CHECK(s.bounded);
}

TEST_CASE("switching stream validates phase lengths") {
  LossSpec spec;
  spec.kind = LossKind::switching;
  Vec a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  spec.phases = {{70, a}, {530, b}};
  const auto s = make_loss_stream(spec, 600, 0);
  CHECK(s.rows[69][0] == 1.0);
  CHECK(s.rows[70][1] == 1.0);

  spec.phases = {{70, a}, {500, b}};
  CHECK_THROWS_WITH_AS(make_loss_stream(spec, 600, 0),
                       doctest::Contains("phase lengths"), std::invalid_argument);
}

TEST_CASE("streams are pure functions of (spec, T, seed)") {
  LossSpec spec;
  spec.kind = LossKind::iid;
  spec.coords.assign(3, CoordDist{CoordDist::Type::uniform, -1.0, 1.0});
  const auto a = make_loss_stream(spec, 64, 42);
  const auto b = make_loss_stream(spec, 64, 42);
  const auto c = make_loss_stream(spec, 64, 43);
  double diff = 0.0;
  for (long t = 0; t < 64; ++t) {
    CHECK((a.rows[t] - b.rows[t]).norm() == 0.0);
    diff += (a.rows[t] - c.rows[t]).norm();
  }
  CHECK(diff > 0.0);
}

TEST_CASE("gaussian polytope stream moments") {
  const int m = 16;
  LossSpec spec;
  spec.kind = LossKind::gaussian_polytope;
  spec.m = m;
  spec.eta = 0.1;
  const long T = 10000;
  const auto s = make_loss_stream(spec, T, 7);
  CHECK_FALSE(s.bounded);

  const double d = 5.0 * m + 2.0;
  const double mean_hot = std::min(std::sqrt(0.1 * d), 1.0);
  const double tol = 5.0 / std::sqrt(static_cast<double>(T));

  Vec mean = Vec::Zero(5 * m + 2), var = Vec::Zero(5 * m + 2);
  for (const auto& r : s.rows) mean += r;
  mean /= static_cast<double>(T);
  for (const auto& r : s.rows) var += (r - mean).cwiseProduct(r - mean);
  var /= static_cast<double>(T);

  for (int i = 0; i < m; ++i) CHECK(mean[i] == 0.0);
  for (int i = m; i < 4 * m; ++i) CHECK(mean[i] == 1.0);
  for (int i = 4 * m; i < 5 * m; ++i) {
    CHECK(std::abs(mean[i]) <= tol);
    CHECK(std::abs(var[i] - 1.0) <= 5.0 * std::sqrt(2.0 / T) + 0.01);
  }
  CHECK(std::abs(mean[5 * m] - mean_hot) <= tol);
  CHECK(mean[5 * m + 1] == 0.0);
}

TEST_CASE("hard polytope structure at m = 16") {
  const auto hp = build_hard_polytope(std::exp(-1.0), 0.1);
  CHECK(hp.m == 16);
  CHECK(hp.d == 82);
  CHECK(hp.A.rows() == 65);
  CHECK(hp.A.cols() == 82);

  // v_1 = 3 e_1 - e_17 - e_33 - e_49 (1-based)
  const Vec& v1 = hp.basis[0];
  CHECK(v1[0] == 3.0);
  CHECK(v1[16] == -1.0);
  CHECK(v1[32] == -1.0);
  CHECK(v1[48] == -1.0);

  for (const auto& v : hp.basis) {
    CHECK((hp.A * v).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(std::abs(v.sum()) <= 1e-12);
  }
  CHECK(hp.domain().feasible(hp.w1.coords));
  CHECK(hp.d_exceeds_inv_eta);  // d = 82 > 1/eta = 10 at desk scale
}

TEST_CASE("hard polytope structural checks across m") {
  struct Case {
    double eps, eta;
    int m;
  } cases[] = {{std::exp(-0.5), 0.2, 8},
               {std::exp(-1.0), 0.1, 16},
               {std::exp(-2.0), 0.1, 32}};
  for (const auto& c : cases) {
    const auto hp = build_hard_polytope(c.eps, c.eta);
    CHECK(hp.m == c.m);
    CHECK(hp.d == 5 * c.m + 2);
    // the generic kernel has the same dimension as the explicit basis
    const auto generic = kernel_basis(hp.domain());
    CHECK(generic.size() == hp.basis.size());
    // alpha_of inverts point_of
    Vec alpha = Vec::Zero(c.m + 1);
    alpha[0] = 0.3 / hp.d;
    alpha[c.m] = -0.4 / hp.d;
    const Vec w = hp.point_of(alpha);
    CHECK((hp.alpha_of(w) - alpha).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
  CHECK_THROWS_WITH_AS(build_hard_polytope(0.9, 0.1),
                       doctest::Contains("eps < 4 eta"), std::invalid_argument);
}

TEST_CASE("hard polytope feasible points live in the simplex") {
  const auto hp = build_hard_polytope(std::exp(-0.5), 0.2);
  const CounterRng rng(808);
  const double inv_d = 1.0 / static_cast<double>(hp.d);
  for (int trial = 0; trial < 16; ++trial) {
    Vec alpha(hp.m + 1);
    for (int i = 0; i <= hp.m; ++i)
      alpha[i] = rng.uniform(trial * 64 + i, -0.2 * inv_d, 0.2 * inv_d);
    const Vec w = hp.point_of(alpha);
    CHECK(hp.domain().feasible(w, 1e-9));
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.minCoeff() > 0.0);
  }
}

TEST_CASE("asymptotic block-size flag raises m") {
  CHECK_THROWS_AS(build_hard_polytope(std::exp(-1.0), 0.1, true, 0),
                  std::invalid_argument);
  const auto hp = build_hard_polytope(std::exp(-1.0), 0.1, true, 2);
  CHECK(hp.m == static_cast<int>(std::ceil(128.0 * std::log(4.0))));
}

TEST_CASE("hard polytope lmo agrees with the dense LP") {
  const auto hp = build_hard_polytope(std::exp(-0.5), 0.2);  // m = 8
  const CounterRng rng(5150);
  for (int trial = 0; trial < 8; ++trial) {
    Vec c(hp.d);
    for (Eigen::Index i = 0; i < hp.d; ++i)
      c[i] = rng.uniform(trial * 128 + i, -1.0, 1.0);
    const Vec fast = hp.lmo(c);
    CHECK(hp.domain().feasible(fast, 1e-9));
    const auto lp = solve_standard_lp(hp.A, hp.b, c);
    CHECK(c.dot(fast) == doctest::Approx(lp.objective).epsilon(1e-9));
  }
}

TEST_CASE("hardness event") {
  const int m = 16;
  LossSpec spec;
  spec.kind = LossKind::gaussian_polytope;
  spec.m = m;
  spec.eta = 0.1;
  LossStream zero = make_loss_stream(spec, 50, 1);
  for (auto& r : zero.rows) r.tail(m + 2).setZero();  // zero the gaussian block
  CHECK(hardness_event(zero, m, 30));

  // one round over the bound flips it
  zero.rows[40][4 * m + 3] = m / 16.0 + 0.5;
  CHECK_FALSE(hardness_event(zero, m, 30));
}

TEST_CASE("sample_until_event is deterministic and consistent") {
  LossSpec spec;
  spec.kind = LossKind::gaussian_polytope;
  spec.m = 8;
  spec.eta = 0.2;
  const double bound = desk_event_round_bound(8, 0.2, 60);
  const auto [s1, t1] = sample_until_event(spec, 60, 50000, 99, 8, 15, bound);
  const auto [s2, t2] = sample_until_event(spec, 60, 50000, 99, 8, 15, bound);
  CHECK(t1 == t2);
  CHECK(s1.seed == s2.seed);
  for (long t = 0; t < 60; ++t) CHECK((s1.rows[t] - s2.rows[t]).norm() == 0.0);
  CHECK(hardness_event(s1, 8, 15, bound));
}

TEST_CASE("event rate: parallel equals serial") {
  LossSpec spec;
  spec.kind = LossKind::gaussian_polytope;
  spec.m = 8;
  spec.eta = 0.2;
  const double bound = desk_event_round_bound(8, 0.2, 40);
  const double serial = hardness_event_rate(spec, 40, 400, 5, 8, 15, bound, 1);
  const double parallel = hardness_event_rate(spec, 40, 400, 5, 8, 15, bound, 2);
  CHECK(serial == parallel);
  CHECK(serial > 0.0);
}

TEST_CASE("loss stream csv dump") {
  LossSpec spec;
  spec.kind = LossKind::constant;
  spec.constant = Vec::Constant(2, 0.5);
  const auto s = make_loss_stream(spec, 3, 0);
  std::ostringstream out;
  write_loss_csv(s, out);
  CHECK(out.str() ==
        "t,l1,l2\r\n1,0.5,0.5\r\n2,0.5,0.5\r\n3,0.5,0.5\r\n");
}
