#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "omdlab/geometry.hpp"
#include "omdlab/rng.hpp"

using namespace omdlab;

namespace {

Point random_interior(const CounterRng& rng, std::uint64_t base, int d) {
  Vec w(d);
  double sum = 0;
  for (int i = 0; i < d; ++i) {
    w[i] = 0.05 + rng.uniform01(base + i);
    sum += w[i];
  }
  return Point::from_coords(w / sum);
}

const Regularizer kBarriers[] = {Regularizer::neg_entropy(),
                                 Regularizer::tsallis(0.5),
                                 Regularizer::tsallis(0.8),
                                 Regularizer::log_barrier()};

}  // namespace

TEST_CASE("scalar derivatives match closed forms") {
  const auto ent = Regularizer::neg_entropy().derivatives(1.0);
  CHECK(ent.r == doctest::Approx(0.0));
  CHECK(ent.r1 == doctest::Approx(1.0));
  CHECK(ent.r2 == doctest::Approx(1.0));

  const auto lb = Regularizer::log_barrier().derivatives(0.5);
  CHECK(lb.r == doctest::Approx(std::log(2.0)));
  CHECK(lb.r1 == doctest::Approx(-2.0));
  CHECK(lb.r2 == doctest::Approx(4.0));

  // r(x) = (x - x^q)/(1-q): r''(x) = q x^(q-2), so r''(1/4) = 0.5 * 4^1.5 = 4
  const auto ts = Regularizer::tsallis(0.5).derivatives(0.25);
  CHECK(ts.r2 == doctest::Approx(4.0));
  CHECK(ts.r == doctest::Approx((0.25 - 0.5) / 0.5));

  CHECK_THROWS_AS(Regularizer::log_barrier().derivatives(0.0), std::domain_error);
  CHECK_THROWS_AS(Regularizer::neg_entropy().derivatives(-0.1), std::domain_error);
}

TEST_CASE("tsallis derivatives agree with central differences") {
  const auto reg = Regularizer::tsallis(0.3);
  const double h = 1e-6;
  for (double x : {0.1, 0.35, 0.7, 0.95}) {
    const double d1 = (reg.r(x + h) - reg.r(x - h)) / (2 * h);
    const double d2 = (reg.r(x + h) - 2 * reg.r(x) + reg.r(x - h)) / (h * h);
    CHECK(reg.r1(x) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(reg.r2(x) == doctest::Approx(d2).epsilon(1e-3));
  }
}

TEST_CASE("barrier sandwich c1/x^nu <= r'' <= c2/x^nu on a log grid") {
  for (const auto& reg : kBarriers) {
    for (double x = 1e-8; x <= 1.0 + 1e-15; x *= 10.0) {
      const double lo = reg.c1() / std::pow(x, reg.nu());
      const double hi = reg.c2() / std::pow(x, reg.nu());
      const double v = reg.r2(x);
      CHECK(v >= lo * (1 - 1e-12));
      CHECK(v <= hi * (1 + 1e-12));
      CHECK(v > 0.0);
    }
  }
}

TEST_CASE("bregman basics") {
  const auto reg = Regularizer::neg_entropy();
  const Point u = uniform_point(2);
  CHECK(bregman(reg, u, u) == doctest::Approx(0.0));

  // quadratic bregman is (beta/2)(w - w')^2
  const auto euc = Regularizer::euclidean(3.0);
  const Point a = Point::from_coords(Vec::Constant(1, 1.0));
  const Point b = Point::from_coords(Vec::Constant(1, 0.0));
  CHECK(bregman(euc, a, b) == doctest::Approx(1.5));

  // KL((1,0)-limit || uniform) = ln 2
  Vec w(2);
  w << 1.0 - 1e-12, 1e-12;
  CHECK(bregman(reg, Point::from_coords(w), u) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("bregman nonnegativity and identity on random pairs") {
  const CounterRng rng(20240811);
  std::uint64_t ctr = 0;
  for (const auto& reg : kBarriers) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Point w1 = random_interior(rng, ctr += 64, 4);
      const Point w2 = random_interior(rng, ctr += 64, 4);
      CHECK(bregman(reg, w1, w2) >= -1e-13);
      CHECK(std::abs(bregman(reg, w1, w1)) <= 1e-13);
    }
  }
}

TEST_CASE("entropy bregman-to-zero is monotone in the second argument") {
  // D_r(0, x) with 0 log 0 = 0 reduces to x for entropy
  const auto reg = Regularizer::neg_entropy();
  const CounterRng rng(7);
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(rng.uniform(i, 1e-6, 1.0));
  std::sort(xs.begin(), xs.end());
  double prev = -1.0;
  for (double x : xs) {
    const double d = -reg.r(x) + reg.r1(x) * x;  // D_r(0,x), 0 log 0 = 0
    CHECK(d >= prev - 1e-15);
    prev = d;
  }
}

TEST_CASE("three-points identity") {
  const CounterRng rng(99);
  std::uint64_t ctr = 0;
  std::vector<Regularizer> regs(kBarriers, kBarriers + 4);
  regs.push_back(Regularizer::euclidean(2.5));
  for (const auto& reg : regs) {
    for (int trial = 0; trial < 200; ++trial) {
      const Point x = random_interior(rng, ctr += 64, 3);
      const Point y = random_interior(rng, ctr += 64, 3);
      const Point z = random_interior(rng, ctr += 64, 3);
      const double lhs = (regularizer_gradient(reg, z) - regularizer_gradient(reg, y))
                             .dot(y.coords - x.coords);
      const double rhs = bregman(reg, x, z) - bregman(reg, x, y) - bregman(reg, y, z);
      CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
  }
}

TEST_CASE("effective smoothness") {
  const auto reg = Regularizer::neg_entropy();
  Vec a(2), b(2);
  a << 0.2, 0.8;
  b << 0.4, 0.6;
  CHECK(effective_smoothness(reg, Point::from_coords(a), Point::from_coords(b)) ==
        doctest::Approx(5.0));

  // degenerate segment: r'' at the point, max over coordinates
  const auto lb = Regularizer::log_barrier();
  const Point p = Point::from_coords(a);
  CHECK(effective_smoothness(lb, p, p) == doctest::Approx(1.0 / (0.2 * 0.2)));

  CHECK(effective_smoothness(Regularizer::euclidean(7.0), p, Point::from_coords(b)) ==
        doctest::Approx(7.0));
}

TEST_CASE("kernel basis of the simplex") {
  const auto basis = kernel_basis(Domain::simplex(3));
  REQUIRE(basis.size() == 2);
  CHECK(basis[0][0] == doctest::Approx(1.0));
  CHECK(basis[0][2] == doctest::Approx(-1.0));
  CHECK(basis[1][1] == doctest::Approx(1.0));
  CHECK(basis[1][2] == doctest::Approx(-1.0));
}

TEST_CASE("kernel basis of a small polytope nulls A and is independent") {
  Mat A(2, 4);
  A << 1, 1, 1, 1,
       1, -1, 0, 0;
  const Vec b = A * Vec::Constant(4, 0.25);
  const auto basis = kernel_basis(Domain::polytope(A, b));
  REQUIRE(basis.size() == 2);
  Mat B(4, 2);
  for (int c = 0; c < 2; ++c) {
    B.col(c) = basis[c];
    CHECK((A * basis[c]).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  CHECK(Eigen::FullPivLU<Mat>(B).rank() == 2);
}

TEST_CASE("kernel basis rejects rank-deficient A naming dependent rows") {
  Mat A(3, 5);
  A.setZero();
  A.row(0) << 1, 1, 1, 1, 1;
  A.row(1) << 1, -1, 0, 0, 0;
  A.row(2) = A.row(0) + A.row(1);
  const Vec b = A * Vec::Constant(5, 0.2);
  CHECK_THROWS_WITH_AS(kernel_basis(Domain::polytope(A, b)),
                       doctest::Contains("dependent rows {2}"),
                       std::runtime_error);
}

TEST_CASE("point log representation stays consistent") {
  Vec lx(3);
  lx << -700.0, -0.5, -2.0;
  const Point p = Point::from_logs(lx);
  for (int i = 0; i < 3; ++i) {
    if (p.coords[i] > 1e-290)
      CHECK(std::exp(p.log_coord(i)) ==
            doctest::Approx(p.coords[i]).epsilon(1e-12));
  }
}
